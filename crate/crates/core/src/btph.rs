//! Brute-force block-Toeplitz-plus-Hankel reference for the c-product.
//!
//! Everything here materializes `(I_1·P) × (I_2·P)` matrices and exists to
//! check the transform-domain algebra on small tensors.

use nalgebra::{DMatrix, DMatrixView};

use crate::error::{Error, Result};
use crate::tensor::{RealTensor, RepIndex, Scalar};
use crate::transforms::{apply_l, build_dct_matrix, Spectrum, TransformKind, TransformSpec};

/// Largest row or column count of a btph matrix this module will build.
pub const ORACLE_LIMIT: usize = 4096;

const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct BtphMatrix {
    matrix: DMatrix<f64>,
    dims: Vec<usize>,
}

impl BtphMatrix {
    /// Wraps a matrix claimed to be the btph of a tensor with `dims`.
    pub fn from_parts(matrix: DMatrix<f64>, dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 3 {
            return Err(Error::shape("btph needs a tensor of order at least 3"));
        }
        let p: usize = dims[2..].iter().product();
        if matrix.shape() != (dims[0] * p, dims[1] * p) {
            return Err(Error::shape(format!(
                "btph of {dims:?} is {}x{}, got {:?}",
                dims[0] * p,
                dims[1] * p,
                matrix.shape()
            )));
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Ordinary matrix product; the result is the btph of an `I_1 × I_2'` tensor.
    pub fn product(&self, other: &BtphMatrix) -> Result<BtphMatrix> {
        if self.dims[2..] != other.dims[2..] || self.dims[1] != other.dims[0] {
            return Err(Error::shape(format!(
                "btph product of {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        let mut dims = self.dims.clone();
        dims[1] = other.dims[1];
        Ok(BtphMatrix {
            matrix: &self.matrix * &other.matrix,
            dims,
        })
    }
}

fn guard(dims: &[usize]) -> Result<()> {
    let p: usize = dims[2..].iter().product();
    let (rows, cols) = (dims[0] * p, dims[1] * p);
    if rows > ORACLE_LIMIT || cols > ORACLE_LIMIT {
        return Err(Error::OracleScale {
            rows,
            cols,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

/// Hankel partner of block `(i, j)` in an `n × n` block grid: `Some(k)` when
/// the block is slice `k`, `None` on the zero anti-diagonal.
fn hankel_slice(i: usize, j: usize, n: usize) -> Option<usize> {
    let s = i + j + 1;
    match s.cmp(&n) {
        std::cmp::Ordering::Less => Some(s),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(2 * n - s),
    }
}

fn build(data: &[f64], rows: usize, cols: usize, trailing: &[usize]) -> DMatrix<f64> {
    let Some((&n, inner)) = trailing.split_last() else {
        return DMatrix::from_column_slice(rows, cols, data);
    };
    let sub_len = rows * cols * inner.iter().product::<usize>();
    let blocks: Vec<DMatrix<f64>> = (0..n)
        .map(|k| build(&data[k * sub_len..(k + 1) * sub_len], rows, cols, inner))
        .collect();
    let (br, bc) = blocks[0].shape();
    let mut out = DMatrix::zeros(n * br, n * bc);
    for i in 0..n {
        for j in 0..n {
            let mut block = blocks[i.abs_diff(j)].clone();
            if let Some(h) = hankel_slice(i, j, n) {
                block += &blocks[h];
            }
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(&block);
        }
    }
    out
}

/// Block-Toeplitz-plus-Hankel matrix of `x`, built recursively over the last mode.
pub fn btph(x: &RealTensor) -> Result<BtphMatrix> {
    if x.order() < 3 {
        return Err(Error::shape("btph needs a tensor of order at least 3"));
    }
    guard(x.dims())?;
    let (rows, cols) = (x.dims()[0], x.dims()[1]);
    Ok(BtphMatrix {
        matrix: build(x.as_slice(), rows, cols, x.trailing_dims()),
        dims: x.dims().to_vec(),
    })
}

fn extract(m: DMatrixView<'_, f64>, rows: usize, cols: usize, trailing: &[usize]) -> Vec<f64> {
    let Some((&n, inner)) = trailing.split_last() else {
        return m.iter().copied().collect();
    };
    let inner_p: usize = inner.iter().product();
    let (br, bc) = (rows * inner_p, cols * inner_p);
    // first block column holds slice k plus its Hankel neighbour k+1
    let sums: Vec<Vec<f64>> = (0..n)
        .map(|k| extract(m.view((k * br, 0), (br, bc)), rows, cols, inner))
        .collect();
    let mut slices = vec![Vec::new(); n];
    slices[n - 1] = sums[n - 1].clone();
    for k in (0..n - 1).rev() {
        slices[k] = sums[k]
            .iter()
            .zip(&slices[k + 1])
            .map(|(s, next)| s - next)
            .collect();
    }
    slices.concat()
}

/// Recovers the tensor whose btph is `m`.
///
/// Fails with [`Error::Structure`] when `m` is not (numerically) a btph matrix.
pub fn ten(m: &BtphMatrix) -> Result<RealTensor> {
    let dims = &m.dims;
    let data = extract(m.matrix.as_view(), dims[0], dims[1], &dims[2..]);
    let x = RealTensor::new(dims.clone(), data)?;
    let rebuilt = build(x.as_slice(), dims[0], dims[1], &dims[2..]);
    let residual = (&rebuilt - &m.matrix).norm();
    if residual > STRUCTURE_TOL * (1.0 + m.matrix.norm()) {
        return Err(Error::Structure { residual });
    }
    Ok(x)
}

/// Block-diagonal matrix of the representative matrices of `slices`, in `p`-order.
pub fn bdiag<T: Scalar>(slices: &crate::tensor::DenseTensor<T>) -> DMatrix<T> {
    let (r, c) = (slices.dims()[0], slices.dims()[1]);
    let p = slices.num_slices();
    let mut out = DMatrix::zeros(r * p, c * p);
    for k in 0..p {
        let view = slices.rep_view(RepIndex(k)).expect("slice index in range");
        out.view_mut((k * r, k * c), (r, c)).copy_from(&view);
    }
    out
}

/// `C_{I_N} ⊗ ⋯ ⊗ C_{I_3} ⊗ I_inner`.
fn dct_kronecker(trailing: &[usize], inner: usize) -> Result<DMatrix<f64>> {
    let mut k = DMatrix::identity(inner, inner);
    for &d in trailing {
        k = build_dct_matrix(d)?.kronecker(&k);
    }
    Ok(k)
}

/// `‖(C ⊗ ⋯ ⊗ I_{I_1}) btph(x) (Cᵀ ⊗ ⋯ ⊗ I_{I_2}) − bdiag(L(x))‖_F` for the c-product `L`.
pub fn check_diagonalization(x: &RealTensor, spec: &TransformSpec) -> Result<f64> {
    if spec.kind() != TransformKind::CProduct {
        return Err(Error::UnsupportedSpec {
            op: "check_diagonalization",
            kind: spec.kind().to_string(),
        });
    }
    if !spec.modes().eq(2..x.order()) {
        return Err(Error::Transform(
            "diagonalization check needs every trailing mode transformed".into(),
        ));
    }
    let b = btph(x)?;
    let trailing = x.trailing_dims();
    let left = dct_kronecker(trailing, x.dims()[0])?;
    let right = dct_kronecker(trailing, x.dims()[1])?;
    let xhat = apply_l(x, spec)?;
    let Spectrum::Real(values) = xhat.values() else {
        return Err(Error::Transform("c-product transform domain must be real".into()));
    };
    let diag = bdiag(values);
    Ok((left * b.matrix() * right.transpose() - diag).norm())
}

/// `ten(btph(a) · btph(b))`.
pub fn cproduct_via_btph(a: &RealTensor, b: &RealTensor) -> Result<RealTensor> {
    if a.order() != b.order() || a.trailing_dims() != b.trailing_dims() || a.dims()[1] != b.dims()[0] {
        return Err(Error::shape(format!(
            "c-product of {:?} and {:?}",
            a.dims(),
            b.dims()
        )));
    }
    ten(&btph(a)?.product(&btph(b)?)?)
}
