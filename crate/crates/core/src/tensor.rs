//! Dense N-order tensors in generalized column-major layout.
//!
//! Entry `(i_1, …, i_N)` (0-based here) lives at flat offset
//! `i_1 + i_2·I_1 + i_3·I_1·I_2 + …`. With that layout the `I_1 × I_2`
//! representative matrices `X^p = X(:, :, k_3, …, k_N)` are contiguous,
//! column-major blocks laid out in `p`-order, which is what every
//! slice-wise operation in this crate relies on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{ComplexField, DMatrix, DMatrixView, DMatrixViewMut};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Element type of numeric tensors: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + fmt::Debug + 'static {
    const IS_COMPLEX: bool;

    fn into_complex(self) -> Complex64;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn into_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn into_complex(self) -> Complex64 {
        self
    }
}

#[derive(Clone, PartialEq)]
pub struct DenseTensor<T = f64> {
    dims: Vec<usize>,
    data: Vec<T>,
}

pub type RealTensor = DenseTensor<f64>;
pub type ComplexTensor = DenseTensor<Complex64>;

fn validate_dims(dims: &[usize]) -> Result<usize> {
    if dims.len() < 2 {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            reason: "order must be at least 2".into(),
        });
    }
    if dims.contains(&0) {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            reason: "every dimension must be positive".into(),
        });
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::InvalidDims {
            dims: dims.to_vec(),
            reason: "element count overflows usize".into(),
        })
}

impl<T> DenseTensor<T> {
    pub fn new(dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let len = validate_dims(&dims)?;
        if data.len() != len {
            return Err(Error::shape(format!(
                "dims {dims:?} need {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn filled(dims: &[usize], value: T) -> Result<Self>
    where
        T: Clone,
    {
        let len = validate_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![value; len],
        })
    }

    /// Builds a tensor by evaluating `f` at every 0-based multi-index, in layout order.
    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let len = validate_dims(dims)?;
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for (k, d) in idx.iter_mut().zip(dims) {
                *k += 1;
                if *k < *d {
                    break;
                }
                *k = 0;
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// Trailing dimensions `I_3, …, I_N` (empty for matrices).
    pub fn trailing_dims(&self) -> &[usize] {
        &self.dims[2..]
    }

    /// Number of representative matrices, `P = I_3 ⋯ I_N`.
    pub fn num_slices(&self) -> usize {
        self.dims[2..].iter().product()
    }

    pub fn slice_len(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    pub fn offset(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.dims.len() {
            return Err(Error::shape(format!(
                "index of length {} for tensor of order {}",
                index.len(),
                self.dims.len()
            )));
        }
        let mut offset = 0;
        let mut stride = 1;
        for (&i, &d) in index.iter().zip(&self.dims) {
            if i >= d {
                return Err(Error::Index { index: i, limit: d });
            }
            offset += i * stride;
            stride *= d;
        }
        Ok(offset)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> DenseTensor<U> {
        DenseTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_map<U, V>(
        &self,
        other: &DenseTensor<U>,
        mut f: impl FnMut(&T, &U) -> V,
    ) -> Result<DenseTensor<V>> {
        self.check_same_dims(other)?;
        Ok(DenseTensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same_dims<U>(&self, other: &DenseTensor<U>) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::shape(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, data: Vec<T>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), data.len());
        Self { dims, data }
    }
}

impl<T> Index<&[usize]> for DenseTensor<T> {
    type Output = T;

    fn index(&self, index: &[usize]) -> &T {
        let offset = self.offset(index).expect("tensor index out of bounds");
        &self.data[offset]
    }
}

impl<T> IndexMut<&[usize]> for DenseTensor<T> {
    fn index_mut(&mut self, index: &[usize]) -> &mut T {
        let offset = self.offset(index).expect("tensor index out of bounds");
        &mut self.data[offset]
    }
}

impl<T: fmt::Debug> fmt::Debug for DenseTensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseTensor")
            .field("dims", &self.dims)
            .field("data", &self.data)
            .finish()
    }
}

impl<T: Scalar> DenseTensor<T> {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        Self::filled(dims, T::zero())
    }

    pub fn ones(dims: &[usize]) -> Result<Self> {
        Self::filled(dims, T::one())
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|&v| v * factor)
    }

    /// `self + factor · other`.
    pub fn axpy(&self, factor: T, other: &Self) -> Result<Self> {
        self.zip_map(other, |&a, &b| a + factor * b)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conjugate())
    }

    pub fn to_complex(&self) -> ComplexTensor {
        self.map(|v| v.into_complex())
    }

    pub fn real_part(&self) -> RealTensor {
        self.map(|v| v.real())
    }

    pub fn imag_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.imaginary() * v.imaginary())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Borrowed view of representative matrix `p` (0-based).
    pub fn rep_view(&self, p: RepIndex) -> Result<DMatrixView<'_, T>> {
        let n = self.num_slices();
        if p.0 >= n {
            return Err(Error::Index {
                index: p.0,
                limit: n,
            });
        }
        let len = self.slice_len();
        Ok(DMatrixView::from_slice(
            &self.data[p.0 * len..(p.0 + 1) * len],
            self.dims[0],
            self.dims[1],
        ))
    }

    pub fn set_rep_matrix(&mut self, p: RepIndex, m: &DMatrix<T>) -> Result<()> {
        let n = self.num_slices();
        if p.0 >= n {
            return Err(Error::Index {
                index: p.0,
                limit: n,
            });
        }
        if m.shape() != (self.dims[0], self.dims[1]) {
            return Err(Error::shape(format!(
                "slice is {}x{}, matrix is {:?}",
                self.dims[0],
                self.dims[1],
                m.shape()
            )));
        }
        let len = self.slice_len();
        self.data[p.0 * len..(p.0 + 1) * len].copy_from_slice(m.as_slice());
        Ok(())
    }

    /// Assembles a tensor from its representative matrices in `p`-order.
    pub fn from_rep_matrices(trailing: &[usize], slices: &[DMatrix<T>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::shape("no representative matrices"))?;
        let (rows, cols) = first.shape();
        let mut dims = vec![rows, cols];
        dims.extend_from_slice(trailing);
        let p: usize = trailing.iter().product();
        if slices.len() != p {
            return Err(Error::shape(format!(
                "{} slices for trailing dims {trailing:?}",
                slices.len()
            )));
        }
        let mut data = Vec::with_capacity(rows * cols * p);
        for s in slices {
            if s.shape() != (rows, cols) {
                return Err(Error::shape("representative matrices differ in shape"));
            }
            data.extend_from_slice(s.as_slice());
        }
        Self::new(dims, data)
    }

    /// Restriction to `rows × cols` in the first two modes, keeping all trailing modes.
    pub fn leading_block(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > self.dims[0] || cols > self.dims[1] {
            return Err(Error::shape(format!(
                "block {rows}x{cols} of {}x{} slices",
                self.dims[0], self.dims[1]
            )));
        }
        let mut dims = self.dims.clone();
        dims[0] = rows;
        dims[1] = cols;
        let i1 = self.dims[0];
        let mut data = Vec::with_capacity(rows * cols * self.num_slices());
        for slice in self.data.chunks(self.slice_len()) {
            for c in 0..cols {
                data.extend_from_slice(&slice[c * i1..c * i1 + rows]);
            }
        }
        Ok(Self::from_parts_unchecked(dims, data))
    }

    /// Plain slice-wise transpose (optionally conjugated) of every representative matrix.
    pub fn transpose_slices(&self, conjugate: bool) -> Self {
        let (r, c) = (self.dims[0], self.dims[1]);
        let mut dims = self.dims.clone();
        dims.swap(0, 1);
        let mut data = Vec::with_capacity(self.data.len());
        for slice in self.data.chunks(self.slice_len()) {
            for i in 0..r {
                for j in 0..c {
                    let v = slice[i + j * r];
                    data.push(if conjugate { v.conjugate() } else { v });
                }
            }
        }
        Self::from_parts_unchecked(dims, data)
    }

    /// Tensor whose every representative matrix is the `n × n` identity.
    pub fn slice_identity(n: usize, trailing: &[usize]) -> Result<Self> {
        let mut dims = vec![n, n];
        dims.extend_from_slice(trailing);
        let mut out = Self::zeros(&dims)?;
        let len = n * n;
        for slice in out.data.chunks_mut(len) {
            for i in 0..n {
                slice[i * (n + 1)] = T::one();
            }
        }
        Ok(out)
    }
}

impl DenseTensor<f64> {
    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Position `p` of a representative matrix, 0-based.
///
/// The trailing multi-index `(k_3, …, k_N)` maps to
/// `p = k_3 + k_4·I_3 + k_5·I_3·I_4 + …`, the same affine map as the flat layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepIndex(pub usize);

impl RepIndex {
    pub fn from_multi(trailing: &[usize], k: &[usize]) -> Result<Self> {
        if k.len() != trailing.len() {
            return Err(Error::shape(format!(
                "multi-index of length {} for {} trailing modes",
                k.len(),
                trailing.len()
            )));
        }
        let mut p = 0;
        let mut stride = 1;
        for (&ki, &d) in k.iter().zip(trailing) {
            if ki >= d {
                return Err(Error::Index { index: ki, limit: d });
            }
            p += ki * stride;
            stride *= d;
        }
        Ok(RepIndex(p))
    }

    pub fn to_multi(self, trailing: &[usize]) -> Result<Vec<usize>> {
        let total: usize = trailing.iter().product();
        if self.0 >= total {
            return Err(Error::Index {
                index: self.0,
                limit: total,
            });
        }
        let mut rem = self.0;
        Ok(trailing
            .iter()
            .map(|&d| {
                let k = rem % d;
                rem /= d;
                k
            })
            .collect())
    }
}

/// `⟨a, b⟩ = Σ conj(a)·b`.
pub fn inner_product<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<T> {
    a.check_same_dims(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .fold(T::zero(), |acc, (&x, &y)| acc + x.conjugate() * y))
}

pub fn fro_norm<T: Scalar>(a: &DenseTensor<T>) -> f64 {
    a.data.iter().map(|v| v.modulus_squared()).sum::<f64>().sqrt()
}

fn mode_split(dims: &[usize], n: usize) -> Result<(usize, usize, usize)> {
    if n >= dims.len() {
        return Err(Error::Mode {
            mode: n,
            order: dims.len(),
        });
    }
    let left = dims[..n].iter().product();
    let right = dims[n + 1..].iter().product();
    Ok((left, dims[n], right))
}

/// Mode-`n` matricization (0-based `n`): columns are the mode-`n` fibers,
/// ordered with the lowest remaining mode varying fastest.
pub fn mode_n_unfold<T: Scalar>(x: &DenseTensor<T>, n: usize) -> Result<DMatrix<T>> {
    let (left, mid, right) = mode_split(&x.dims, n)?;
    Ok(DMatrix::from_fn(mid, left * right, |i, j| {
        let (l, r) = (j % left, j / left);
        x.data[l + i * left + r * left * mid]
    }))
}

/// Inverse of [`mode_n_unfold`] for a tensor of shape `dims`.
pub fn mode_n_fold<T: Scalar>(m: &DMatrix<T>, n: usize, dims: &[usize]) -> Result<DenseTensor<T>> {
    let (left, mid, right) = mode_split(dims, n)?;
    if m.shape() != (mid, left * right) {
        return Err(Error::shape(format!(
            "unfolding of {dims:?} along mode {n} is {mid}x{}, got {:?}",
            left * right,
            m.shape()
        )));
    }
    let total = left * mid * right;
    let mut data = vec![T::zero(); total];
    for r in 0..right {
        for i in 0..mid {
            for l in 0..left {
                data[l + i * left + r * left * mid] = m[(i, l + r * left)];
            }
        }
    }
    DenseTensor::new(dims.to_vec(), data)
}

/// `x ×_n u`: replaces mode `n` (0-based) of size `I_n` by `u.nrows()`.
pub fn mode_n_product<T: Scalar>(
    x: &DenseTensor<T>,
    u: &DMatrix<T>,
    n: usize,
) -> Result<DenseTensor<T>> {
    let (left, mid, right) = mode_split(&x.dims, n)?;
    if u.ncols() != mid {
        return Err(Error::shape(format!(
            "mode-{n} product needs {mid} matrix columns, got {}",
            u.ncols()
        )));
    }
    let rows = u.nrows();
    let mut dims = x.dims.clone();
    dims[n] = rows;
    validate_dims(&dims)?;
    let mut out = vec![T::zero(); left * rows * right];
    for r in 0..right {
        let src_block = &x.data[r * left * mid..(r + 1) * left * mid];
        let dst_block = &mut out[r * left * rows..(r + 1) * left * rows];
        for j in 0..rows {
            let dst = &mut dst_block[j * left..(j + 1) * left];
            for i in 0..mid {
                let c = u[(j, i)];
                if c.is_zero() {
                    continue;
                }
                let src = &src_block[i * left..(i + 1) * left];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    Ok(DenseTensor::from_parts_unchecked(dims, out))
}

/// Slice-wise matrix product `C^p = A^p B^p` over all representative matrices.
pub fn facewise_product<T: Scalar>(
    a: &DenseTensor<T>,
    b: &DenseTensor<T>,
) -> Result<DenseTensor<T>> {
    if a.order() != b.order() || a.trailing_dims() != b.trailing_dims() {
        return Err(Error::shape(format!(
            "trailing dims differ: {:?} vs {:?}",
            a.dims, b.dims
        )));
    }
    let (m, k, n) = (a.dims[0], a.dims[1], b.dims[1]);
    if b.dims[0] != k {
        return Err(Error::shape(format!(
            "inner dimensions differ: {:?} vs {:?}",
            a.dims, b.dims
        )));
    }
    let mut dims = a.dims.clone();
    dims[1] = n;
    let mut out = vec![T::zero(); m * n * a.num_slices()];
    out.par_chunks_mut(m * n)
        .zip(a.data.par_chunks(m * k))
        .zip(b.data.par_chunks(k * n))
        .for_each(|((c, sa), sb)| {
            let av = DMatrixView::from_slice(sa, m, k);
            let bv = DMatrixView::from_slice(sb, k, n);
            let mut cv = DMatrixViewMut::from_slice(c, m, n);
            cv.gemm(T::one(), &av, &bv, T::zero());
        });
    Ok(DenseTensor::from_parts_unchecked(dims, out))
}

/// Owned copy of representative matrix `p`.
pub fn rep_matrix<T: Scalar>(x: &DenseTensor<T>, p: RepIndex) -> Result<DMatrix<T>> {
    Ok(x.rep_view(p)?.into_owned())
}

impl<T: Scalar> Add for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn add(self, rhs: Self) -> DenseTensor<T> {
        self.zip_map(rhs, |&a, &b| a + b)
            .expect("tensor addition with mismatched dims")
    }
}

impl<T: Scalar> Sub for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn sub(self, rhs: Self) -> DenseTensor<T> {
        self.zip_map(rhs, |&a, &b| a - b)
            .expect("tensor subtraction with mismatched dims")
    }
}

impl<T: Scalar> Mul<T> for &DenseTensor<T> {
    type Output = DenseTensor<T>;

    fn mul(self, rhs: T) -> DenseTensor<T> {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(dims: &[usize]) -> RealTensor {
        let n: usize = dims.iter().product();
        RealTensor::new(dims.to_vec(), (1..=n).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(RealTensor::zeros(&[3]).is_err());
        assert!(RealTensor::zeros(&[2, 0, 2]).is_err());
        assert!(RealTensor::new(vec![2, 2], vec![1.0; 3]).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let ones = RealTensor::ones(&[2, 2, 2]).unwrap();
        assert_eq!(inner_product(&ones, &ones).unwrap(), 8.0);
        let s = seq(&[2, 2, 2]);
        // 1² + … + 8²
        let oracle: f64 = (1..=8).map(|k| (k * k) as f64).sum();
        assert_eq!(oracle, 204.0);
        assert_eq!(inner_product(&s, &s).unwrap(), oracle);
        let z = RealTensor::zeros(&[2, 2, 2]).unwrap();
        assert_eq!(inner_product(&z, &s).unwrap(), 0.0);
        assert!(inner_product(&s, &seq(&[2, 4])).is_err());
    }

    #[test]
    fn inner_product_conjugates_first_argument() {
        let a = ComplexTensor::new(vec![1, 1, 1], vec![Complex64::new(0.0, 1.0)]).unwrap();
        let b = ComplexTensor::new(vec![1, 1, 1], vec![Complex64::new(0.0, 1.0)]).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), Complex64::new(1.0, 0.0));
        assert!((fro_norm(&a).powi(2) - inner_product(&a, &a).unwrap().re).abs() < 1e-15);
    }

    #[test]
    fn fro_norm_examples() {
        assert_eq!(fro_norm(&RealTensor::zeros(&[2, 2, 2]).unwrap()), 0.0);
        let ones = RealTensor::ones(&[2, 2, 2]).unwrap();
        assert!((fro_norm(&ones) - 8f64.sqrt()).abs() < 1e-15);
        assert!((fro_norm(&seq(&[2, 2, 2])) - 204f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unfold_mode_one_of_sequence() {
        let m = mode_n_unfold(&seq(&[2, 2, 2]), 0).unwrap();
        let expected = DMatrix::from_row_slice(2, 4, &[1., 3., 5., 7., 2., 4., 6., 8.]);
        assert_eq!(m, expected);
    }

    #[test]
    fn unfold_scalar_tensor_along_mode_three() {
        let x = seq(&[1, 1, 5]);
        let m = mode_n_unfold(&x, 2).unwrap();
        assert_eq!(m.shape(), (5, 1));
        assert_eq!(m.as_slice(), x.as_slice());
        // the single fiber is the tube itself
        assert_eq!(mode_n_unfold(&x, 3).unwrap_err().to_string(), "mode 3 out of range for tensor of order 3");
    }

    #[test]
    fn mode_product_examples() {
        let tube = RealTensor::new(vec![1, 1, 2], vec![1.0, 2.0]).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 0.0]);
        let out = mode_n_product(&tube, &m, 2).unwrap();
        assert_eq!(out.as_slice(), &[5.0, 1.0]);

        let x = seq(&[2, 3, 2]);
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(mode_n_product(&x, &id, 1).unwrap(), x);
        assert!(mode_n_product(&x, &id, 0).is_err());
    }

    #[test]
    fn facewise_examples() {
        let a = RealTensor::new(vec![1, 1, 2], vec![5.0, 1.0]).unwrap();
        let b = RealTensor::new(vec![1, 1, 2], vec![11.0, 3.0]).unwrap();
        assert_eq!(facewise_product(&a, &b).unwrap().as_slice(), &[55.0, 3.0]);

        let x = seq(&[2, 3, 2, 2]);
        let id = RealTensor::slice_identity(3, &[2, 2]).unwrap();
        assert_eq!(facewise_product(&x, &id).unwrap(), x);
        let z = RealTensor::zeros(&[2, 2, 2, 2]).unwrap();
        assert_eq!(
            facewise_product(&z, &seq(&[2, 3, 2, 2])).unwrap(),
            RealTensor::zeros(&[2, 3, 2, 2]).unwrap()
        );
        assert!(facewise_product(&x, &x).is_err());
        assert!(facewise_product(&x, &RealTensor::zeros(&[3, 3, 2, 3]).unwrap()).is_err());
    }

    #[test]
    fn rep_matrix_examples() {
        let x = seq(&[2, 2, 3]);
        assert_eq!(rep_matrix(&x, RepIndex(1)).unwrap().as_slice(), &[5., 6., 7., 8.]);

        // 1-based p = 3 in a 2×2×2×2 tensor is X(:,:,1,2)
        let x = seq(&[2, 2, 2, 2]);
        let p = RepIndex::from_multi(&[2, 2], &[0, 1]).unwrap();
        assert_eq!(p, RepIndex(2));
        let m = rep_matrix(&x, p).unwrap();
        assert_eq!(m[(1, 0)], x[&[1, 0, 0, 1][..]]);

        let s = seq(&[1, 1, 4]);
        assert_eq!(rep_matrix(&s, RepIndex(3)).unwrap(), DMatrix::from_element(1, 1, 4.0));
        assert!(rep_matrix(&s, RepIndex(4)).is_err());
    }

    #[test]
    fn rep_index_bijection_exhaustive() {
        let trailing = [3, 2, 2];
        let total: usize = trailing.iter().product();
        let mut seen = vec![false; total];
        for k5 in 0..2 {
            for k4 in 0..2 {
                for k3 in 0..3 {
                    let p = RepIndex::from_multi(&trailing, &[k3, k4, k5]).unwrap();
                    assert_eq!(p.0, k3 + k4 * 3 + k5 * 6);
                    assert!(!seen[p.0]);
                    seen[p.0] = true;
                    assert_eq!(p.to_multi(&trailing).unwrap(), vec![k3, k4, k5]);
                }
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn reassembling_slices_reconstructs() {
        let x = seq(&[2, 3, 2, 2]);
        let slices: Vec<_> = (0..x.num_slices())
            .map(|p| rep_matrix(&x, RepIndex(p)).unwrap())
            .collect();
        assert_eq!(RealTensor::from_rep_matrices(&[2, 2], &slices).unwrap(), x);
        let mut y = RealTensor::zeros(x.dims()).unwrap();
        for (p, s) in slices.iter().enumerate() {
            y.set_rep_matrix(RepIndex(p), s).unwrap();
        }
        assert_eq!(y, x);
    }

    #[test]
    fn leading_block_and_transpose() {
        let x = seq(&[3, 3, 2]);
        let b = x.leading_block(2, 1).unwrap();
        assert_eq!(b.dims(), &[2, 1, 2]);
        assert_eq!(b.as_slice(), &[1., 2., 10., 11.]);
        let t = x.transpose_slices(false);
        assert_eq!(t[&[0, 1, 1][..]], x[&[1, 0, 1][..]]);
        assert_eq!(t.transpose_slices(false), x);
    }
}
