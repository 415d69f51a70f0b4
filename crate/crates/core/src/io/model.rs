use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::matrix::{format_rows, parse_rows};
use super::{content_lines, format_value, header, parse_err, parse_usizes, parse_value, Field};
use crate::error::Result;
use crate::models::{
    synth_confac, synth_parafac, synth_paratuck, synth_tucker, ConfacModel, ParafacModel, ParatuckModel, TuckerModel,
};
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Parafac,
    Tucker,
    Confac,
    Paratuck,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Parafac => "parafac",
            Family::Tucker => "tucker",
            Family::Confac => "confac",
            Family::Paratuck => "paratuck",
        }
    }

    fn parse(s: &str, line: usize) -> Result<Family> {
        match s {
            "parafac" => Ok(Family::Parafac),
            "tucker" => Ok(Family::Tucker),
            "confac" | "paralind" => Ok(Family::Confac),
            "paratuck" => Ok(Family::Paratuck),
            other => Err(parse_err(line, format!("unknown family `{other}`"))),
        }
    }
}

/// Raw contents of a `.mdl` file: family tag plus named blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor<T: Scalar> {
    pub family: Family,
    pub matrices: BTreeMap<String, DMatrix<T>>,
    pub tensors: BTreeMap<String, DenseTensor<T>>,
}

impl<T: Scalar> Descriptor<T> {
    /// `prefix1, prefix2, ..` up to the first missing index.
    pub fn indexed(&self, prefix: &str) -> Vec<DMatrix<T>> {
        (1..).map_while(|n| self.matrices.get(&format!("{prefix}{n}")).cloned()).collect()
    }

    pub fn tensor(&self, name: &str) -> Result<DenseTensor<T>> {
        self.tensors
            .get(name)
            .cloned()
            .ok_or_else(|| parse_err(0, format!("{} descriptor lacks tensor `{name}`", self.family.name())))
    }

    pub fn into_model(self) -> Result<AnyModel<T>> {
        let factors = self.indexed("factor");
        let constraints = self.indexed("constraint");
        Ok(match self.family {
            Family::Parafac => {
                let weights = self.matrices.get("weights").map(|w| DVector::from_iterator(w.len(), w.iter().copied()));
                AnyModel::Parafac(ParafacModel::new(factors, weights)?)
            }
            Family::Tucker => AnyModel::Tucker(TuckerModel::new(self.tensor("core")?, factors)?),
            Family::Confac => AnyModel::Confac(ConfacModel::new(factors, constraints)?),
            Family::Paratuck => AnyModel::Paratuck(ParatuckModel::new(factors, constraints, self.tensor("input")?)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel<T: Scalar> {
    Parafac(ParafacModel<T>),
    Tucker(TuckerModel<T>),
    Confac(ConfacModel<T>),
    Paratuck(ParatuckModel<T>),
}

impl<T: Scalar> AnyModel<T> {
    pub fn family(&self) -> Family {
        match self {
            AnyModel::Parafac(_) => Family::Parafac,
            AnyModel::Tucker(_) => Family::Tucker,
            AnyModel::Confac(_) => Family::Confac,
            AnyModel::Paratuck(_) => Family::Paratuck,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            AnyModel::Parafac(m) => m.dims(),
            AnyModel::Tucker(m) => m.dims(),
            AnyModel::Confac(m) => m.dims(),
            AnyModel::Paratuck(m) => m.dims(),
        }
    }

    pub fn synth(&self) -> Result<DenseTensor<T>> {
        match self {
            AnyModel::Parafac(m) => synth_parafac(m),
            AnyModel::Tucker(m) => synth_tucker(m),
            AnyModel::Confac(m) => synth_confac(m),
            AnyModel::Paratuck(m) => synth_paratuck(m),
        }
    }
}

pub fn parse_descriptor<T: Scalar>(text: &str) -> Result<Descriptor<T>> {
    let mut lines = content_lines(text);
    let (line, family) = header(lines.next(), "family")?;
    let family = Family::parse(family, line)?;
    let (line, field) = header(lines.next(), "field")?;
    let field = Field::parse(field, line)?;
    field.check_into::<T>()?;
    let mut desc = Descriptor { family, matrices: BTreeMap::new(), tensors: BTreeMap::new() };
    while let Some((i, l)) = lines.next() {
        let mut words = l.split_whitespace();
        let kind = words.next().unwrap_or_default();
        let name = words.next().ok_or_else(|| parse_err(i + 1, "block without a name"))?.to_string();
        let sizes = parse_usizes(&words.collect::<Vec<_>>().join(" "), i + 1)?;
        if desc.matrices.contains_key(&name) || desc.tensors.contains_key(&name) {
            return Err(parse_err(i + 1, format!("duplicate block `{name}`")));
        }
        match kind {
            "matrix" => {
                let [rows, cols] = sizes[..] else {
                    return Err(parse_err(i + 1, "matrix block needs two sizes"));
                };
                desc.matrices.insert(name, parse_rows(&mut lines, rows, cols, field)?);
            }
            "tensor" => {
                let count: usize = sizes.iter().product();
                let mut values = Vec::with_capacity(count);
                while values.len() < count {
                    let (j, row) = lines
                        .next()
                        .ok_or_else(|| parse_err(i + 1, format!("tensor `{name}` ends early")))?;
                    for t in row.split_whitespace() {
                        values.push(parse_value::<T>(t, field, j + 1)?);
                    }
                }
                if values.len() != count {
                    return Err(parse_err(i + 1, format!("tensor `{name}` has {} values, expected {count}", values.len())));
                }
                desc.tensors.insert(name, DenseTensor::new(sizes, values)?);
            }
            other => return Err(parse_err(i + 1, format!("unknown block kind `{other}`"))),
        }
    }
    Ok(desc)
}

pub fn parse_model<T: Scalar>(text: &str) -> Result<AnyModel<T>> {
    parse_descriptor(text)?.into_model()
}

fn push_matrix<T: Scalar>(out: &mut String, name: &str, m: &DMatrix<T>) {
    out.push_str(&format!("matrix {name} {} {}\n", m.nrows(), m.ncols()));
    format_rows(m, out);
}

fn push_tensor<T: Scalar>(out: &mut String, name: &str, x: &DenseTensor<T>) {
    let dims: Vec<String> = x.dims().iter().map(|d| d.to_string()).collect();
    out.push_str(&format!("tensor {name} {}\n", dims.join(" ")));
    let row = x.dims().last().copied().unwrap_or(1).max(1);
    for chunk in x.data().chunks(row) {
        let values: Vec<String> = chunk.iter().map(|&v| format_value(v)).collect();
        out.push_str(&values.join(" "));
        out.push('\n');
    }
}

pub fn format_model<T: Scalar>(m: &AnyModel<T>) -> String {
    let mut out = format!("family: {}\nfield: {}\n", m.family().name(), Field::of::<T>().name());
    let indexed = |out: &mut String, prefix: &str, mats: &[DMatrix<T>]| {
        for (n, a) in mats.iter().enumerate() {
            push_matrix(out, &format!("{prefix}{}", n + 1), a);
        }
    };
    match m {
        AnyModel::Parafac(p) => {
            indexed(&mut out, "factor", &p.factors);
            if let Some(w) = &p.weights {
                push_matrix(&mut out, "weights", &DMatrix::from_row_slice(1, w.len(), w.as_slice()));
            }
        }
        AnyModel::Tucker(t) => {
            push_tensor(&mut out, "core", &t.core);
            indexed(&mut out, "factor", &t.factors);
        }
        AnyModel::Confac(c) => {
            indexed(&mut out, "factor", &c.factors);
            indexed(&mut out, "constraint", &c.constraints);
        }
        AnyModel::Paratuck(p) => {
            indexed(&mut out, "factor", &p.factors);
            indexed(&mut out, "constraint", &p.constraints);
            push_tensor(&mut out, "input", &p.input);
        }
    }
    out
}

pub fn read_model<T: Scalar>(path: &Path) -> Result<AnyModel<T>> {
    parse_model(&std::fs::read_to_string(path)?)
}

pub fn write_model<T: Scalar>(path: &Path, m: &AnyModel<T>) -> Result<()> {
    Ok(std::fs::write(path, format_model(m))?)
}
