//! Kronecker, Khatri-Rao and Hadamard products, their block-wise variants
//! and tensor extensions of matrices. Multi-operand products associate left
//! to right, so `kron(&[a, b, c]) = (a ⊗ b) ⊗ c`.

use nalgebra::{DMatrix, DVector};

use crate::error::{shape, Error, Result};
use crate::linalg::{diag, relative_error_slice};
use crate::scalar::Scalar;
use crate::tensor::strides;

pub fn kron2<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra * rb, ca * cb);
    for ja in 0..ca {
        for ia in 0..ra {
            let s = a[(ia, ja)];
            if s.is_zero() {
                continue;
            }
            let mut block = out.view_mut((ia * rb, ja * cb), (rb, cb));
            block.zip_apply(b, |o, v| *o = s * v);
        }
    }
    out
}

pub fn kron<T: Scalar>(mats: &[DMatrix<T>]) -> Result<DMatrix<T>> {
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::Arity("Kronecker product of zero matrices".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, m| kron2(&acc, m)))
}

pub fn khatri_rao2<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<DMatrix<T>> {
    if a.ncols() != b.ncols() {
        return Err(shape(format!(
            "Khatri-Rao product needs equal column counts, got {} and {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let (ra, rb) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(ra * rb, a.ncols());
    for r in 0..a.ncols() {
        for ia in 0..ra {
            let s = a[(ia, r)];
            for ib in 0..rb {
                out[(ia * rb + ib, r)] = s * b[(ib, r)];
            }
        }
    }
    Ok(out)
}

/// Column-wise Kronecker product.
pub fn khatri_rao<T: Scalar>(mats: &[DMatrix<T>]) -> Result<DMatrix<T>> {
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::Arity("Khatri-Rao product of zero matrices".into()))?;
    rest.iter().try_fold(first.clone(), |acc, m| khatri_rao2(&acc, m))
}

pub fn hadamard<T: Scalar>(mats: &[DMatrix<T>]) -> Result<DMatrix<T>> {
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::Arity("Hadamard product of zero matrices".into()))?;
    let mut out = first.clone();
    for m in rest {
        if m.shape() != out.shape() {
            return Err(shape(format!(
                "Hadamard product of {:?} and {:?} matrices",
                out.shape(),
                m.shape()
            )));
        }
        out.component_mul_assign(m);
    }
    Ok(out)
}

/// `vec(M)`: columns stacked top to bottom.
pub fn vec_matrix<T: Scalar>(m: &DMatrix<T>) -> DVector<T> {
    DVector::from_column_slice(m.as_slice())
}

/// Checks `vec(A C E) = (E^T ⊗ A) vec(C)` and `vec(A diag(x) C) = (C^T ⋄ A) x`
/// to `1e-12` relative error.
pub fn vec_identities_check<T: Scalar>(a: &DMatrix<T>, c: &DMatrix<T>, e: &DMatrix<T>, x: &DVector<T>) -> bool {
    if a.ncols() != c.nrows() || c.ncols() != e.nrows() || x.len() != a.ncols() {
        return false;
    }
    let lhs = vec_matrix(&(a * c * e));
    let rhs = kron2(&e.transpose(), a) * vec_matrix(c);
    let first = relative_error_slice(lhs.as_slice(), rhs.as_slice()) <= 1e-12;

    let lhs = vec_matrix(&(a * diag(x) * c));
    let second = match khatri_rao2(&c.transpose(), a) {
        Ok(kr) => relative_error_slice(lhs.as_slice(), (kr * x).as_slice()) <= 1e-12,
        Err(_) => false,
    };
    first && second
}

/// A matrix partitioned column-wise into blocks of widths `block_cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<T: Scalar> {
    pub mat: DMatrix<T>,
    pub block_cols: Vec<usize>,
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn new(mat: DMatrix<T>, block_cols: Vec<usize>) -> Result<Self> {
        let total: usize = block_cols.iter().sum();
        if total != mat.ncols() {
            return Err(shape(format!(
                "block widths {:?} sum to {}, matrix has {} columns",
                block_cols,
                total,
                mat.ncols()
            )));
        }
        Ok(BlockMatrix { mat, block_cols })
    }

    /// Concatenates blocks horizontally.
    pub fn from_blocks(blocks: &[DMatrix<T>]) -> Result<Self> {
        let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
        if blocks.iter().any(|b| b.nrows() != rows) {
            return Err(shape("blocks have different row counts"));
        }
        let widths: Vec<usize> = blocks.iter().map(|b| b.ncols()).collect();
        let mut mat = DMatrix::zeros(rows, widths.iter().sum());
        let mut off = 0;
        for b in blocks {
            mat.view_mut((0, off), b.shape()).copy_from(b);
            off += b.ncols();
        }
        Ok(BlockMatrix { mat, block_cols: widths })
    }

    pub fn num_blocks(&self) -> usize {
        self.block_cols.len()
    }

    /// Block `p` (0-based).
    pub fn block(&self, p: usize) -> DMatrix<T> {
        let start: usize = self.block_cols[..p].iter().sum();
        self.mat.columns(start, self.block_cols[p]).into_owned()
    }

    pub fn blocks(&self) -> Vec<DMatrix<T>> {
        (0..self.num_blocks()).map(|p| self.block(p)).collect()
    }
}

fn blockwise<T: Scalar>(
    mats: &[BlockMatrix<T>],
    op: impl Fn(&[DMatrix<T>]) -> Result<DMatrix<T>>,
) -> Result<BlockMatrix<T>> {
    let p = mats
        .first()
        .ok_or_else(|| Error::Arity("block-wise product of zero matrices".into()))?
        .num_blocks();
    if let Some(bad) = mats.iter().find(|m| m.num_blocks() != p) {
        return Err(shape(format!("block counts differ: {} vs {}", p, bad.num_blocks())));
    }
    let per_block = (0..p)
        .map(|b| {
            let operands: Vec<DMatrix<T>> = mats.iter().map(|m| m.block(b)).collect();
            op(&operands)
        })
        .collect::<Result<Vec<_>>>()?;
    BlockMatrix::from_blocks(&per_block)
}

/// Block-wise Kronecker product: `[A^(1) ⊗ B^(1), .., A^(P) ⊗ B^(P)]`.
pub fn block_kron<T: Scalar>(mats: &[BlockMatrix<T>]) -> Result<BlockMatrix<T>> {
    blockwise(mats, kron)
}

/// Block-wise Khatri-Rao product.
pub fn block_khatri_rao<T: Scalar>(mats: &[BlockMatrix<T>]) -> Result<BlockMatrix<T>> {
    blockwise(mats, khatri_rao)
}

/// Block-diagonal matrix from square or rectangular blocks.
pub fn block_diag<T: Scalar>(blocks: &[DMatrix<T>]) -> DMatrix<T> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

fn check_extension(len: usize, position: usize, reps: &[usize]) -> Result<()> {
    if position == 0 || position > reps.len() {
        return Err(shape(format!("extension position {position} outside 1..={}", reps.len())));
    }
    if reps[position - 1] != len {
        return Err(shape(format!(
            "extension along position {position}: matrix side is {len}, reps give {}",
            reps[position - 1]
        )));
    }
    Ok(())
}

/// `B (1^T_{R1} ⊗ .. ⊗ I_{R_pos} ⊗ .. ⊗ 1^T_{RN})`: column `(r1, .., rN)` of
/// the result is column `r_pos` of `B`.
pub fn tensor_extension<T: Scalar>(b: &DMatrix<T>, position: usize, reps: &[usize]) -> Result<DMatrix<T>> {
    check_extension(b.ncols(), position, reps)?;
    let total: usize = reps.iter().product();
    let stride = strides(reps)[position - 1];
    let len = reps[position - 1];
    Ok(DMatrix::from_fn(b.nrows(), total, |i, r| b[(i, (r / stride) % len)]))
}

/// `(1_{I1} ⊗ .. ⊗ I_{I_pos} ⊗ .. ⊗ 1_{IN}) B`: row `(i1, .., iN)` of the
/// result is row `i_pos` of `B`.
pub fn tensor_extension_rows<T: Scalar>(b: &DMatrix<T>, position: usize, reps: &[usize]) -> Result<DMatrix<T>> {
    check_extension(b.nrows(), position, reps)?;
    let total: usize = reps.iter().product();
    let stride = strides(reps)[position - 1];
    let len = reps[position - 1];
    Ok(DMatrix::from_fn(total, b.ncols(), |i, r| b[((i / stride) % len, r)]))
}
