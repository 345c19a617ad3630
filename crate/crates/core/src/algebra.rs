//! Products, transposes, factorizations and norms under `∗_L`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{fro_norm, DenseTensor, RealTensor, Scalar};
use crate::transforms::{apply_l, apply_l_inv, Spectrum, TransformSpec, TransformedTensor};

/// Default relative cutoff for counting a singular value as nonzero.
pub const RANK_THRESHOLD: f64 = 1e-10;

trait Domain: Scalar {
    fn wrap(t: DenseTensor<Self>) -> Spectrum;
}

impl Domain for f64 {
    fn wrap(t: DenseTensor<Self>) -> Spectrum {
        Spectrum::Real(t)
    }
}

impl Domain for Complex64 {
    fn wrap(t: DenseTensor<Self>) -> Spectrum {
        Spectrum::Complex(t)
    }
}

macro_rules! on_spectrum {
    ($spectrum:expr, |$t:ident| $body:expr) => {
        match $spectrum {
            Spectrum::Real($t) => $body,
            Spectrum::Complex($t) => $body,
        }
    };
}

fn back_to_real(values: Spectrum, spec: &TransformSpec) -> Result<RealTensor> {
    apply_l_inv(&TransformedTensor::new(values, spec, true)?)
}

/// `A ∗_L B` for real tensors whose first two modes conform.
pub fn l_product(a: &RealTensor, b: &RealTensor, spec: &TransformSpec) -> Result<RealTensor> {
    let ahat = apply_l(a, spec)?;
    let bhat = apply_l(b, spec)?;
    apply_l_inv(&ahat.facewise(&bhat)?)
}

/// The `∗_L` identity: every transform-domain slice is `I_n`.
pub fn identity_tensor(n: usize, trailing: &[usize], spec: &TransformSpec) -> Result<RealTensor> {
    let slices = RealTensor::slice_identity(n, trailing)?;
    let values = if spec.is_complex() {
        Spectrum::Complex(slices.to_complex())
    } else {
        Spectrum::Real(slices)
    };
    back_to_real(values, spec)
}

/// `A^H` under `∗_L`: each transform-domain slice is conjugate-transposed.
pub fn l_transpose(a: &RealTensor, spec: &TransformSpec) -> Result<RealTensor> {
    let ahat = apply_l(a, spec)?;
    let values = on_spectrum!(ahat.values(), |t| Domain::wrap(t.transpose_slices(true)));
    back_to_real(values, spec)
}

/// Whether `Q^H ∗ Q` and `Q ∗ Q^H` both lie within `tol` (Frobenius) of the identity.
pub fn is_orthogonal(q: &RealTensor, spec: &TransformSpec, tol: f64) -> Result<bool> {
    let (r, c) = (q.dims()[0], q.dims()[1]);
    if r != c {
        return Ok(false);
    }
    let qt = l_transpose(q, spec)?;
    let id = identity_tensor(r, q.trailing_dims(), spec)?;
    let left = fro_norm(&(&l_product(&qt, q, spec)? - &id));
    let right = fro_norm(&(&l_product(q, &qt, spec)? - &id));
    Ok(left <= tol && right <= tol)
}

struct SliceSvd<T: Scalar> {
    u: DMatrix<T>,
    sigma: DVector<f64>,
    v: DMatrix<T>,
}

impl<T: Scalar> SliceSvd<T> {
    fn conj(&self) -> Self {
        Self {
            u: self.u.map(|z| z.conjugate()),
            sigma: self.sigma.clone(),
            v: self.v.map(|z| z.conjugate()),
        }
    }
}

/// Extends orthonormal columns to a unitary basis by greedy Gram–Schmidt over
/// the standard basis.
fn complete_basis<T: Scalar>(q: DMatrix<T>) -> DMatrix<T> {
    let m = q.nrows();
    let mut cols: Vec<DVector<T>> = q.column_iter().map(|c| c.into_owned()).collect();
    let project_out = |v: &mut DVector<T>, cols: &[DVector<T>]| {
        for c in cols {
            let coef = c.dotc(v);
            v.axpy(-coef, c, T::one());
        }
    };
    while cols.len() < m {
        let mut best: Option<(f64, DVector<T>)> = None;
        for j in 0..m {
            let mut e = DVector::<T>::zeros(m);
            e[j] = T::one();
            project_out(&mut e, &cols);
            let n = e.norm();
            if best.as_ref().is_none_or(|(b, _)| n > *b) {
                best = Some((n, e));
            }
        }
        let (_, mut v) = best.expect("m > 0");
        project_out(&mut v, &cols);
        let n = v.norm();
        v.unscale_mut(n);
        cols.push(v);
    }
    DMatrix::from_columns(&cols)
}

fn svd_of<T: Scalar>(m: DMatrix<T>, full: bool) -> SliceSvd<T> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^H").adjoint();
    let (u, v) = if full {
        (complete_basis(u), complete_basis(v))
    } else {
        (u, v)
    };
    SliceSvd {
        u,
        sigma: svd.singular_values,
        v,
    }
}

/// SVD of every representative matrix. For hermitian spectra only one slice of
/// each conjugate pair is factorized, and self-conjugate slices are factorized
/// in real arithmetic, so the inverse transform of the factors stays real.
fn slice_svds<T: Scalar>(
    values: &DenseTensor<T>,
    hermitian: bool,
    partner: &(dyn Fn(usize) -> usize + Sync),
    full: bool,
) -> Vec<SliceSvd<T>> {
    let n = values.num_slices();
    let mut out: Vec<Option<SliceSvd<T>>> = (0..n)
        .into_par_iter()
        .map(|p| {
            let q = if hermitian { partner(p) } else { p };
            if q < p {
                return None;
            }
            let m = values
                .rep_view(crate::tensor::RepIndex(p))
                .expect("slice index in range")
                .into_owned();
            Some(if hermitian && q == p {
                let re = svd_of(m.map(|z| z.real()), full);
                SliceSvd {
                    u: re.u.map(T::from_real),
                    sigma: re.sigma,
                    v: re.v.map(T::from_real),
                }
            } else {
                svd_of(m, full)
            })
        })
        .collect();
    for p in 0..n {
        if out[p].is_none() {
            let mirrored = out[partner(p)].as_ref().expect("partner precedes p").conj();
            out[p] = Some(mirrored);
        }
    }
    out.into_iter().map(|s| s.expect("every slice factorized")).collect()
}

fn singular_values<T: Scalar>(values: &DenseTensor<T>) -> Vec<DVector<f64>> {
    (0..values.num_slices())
        .into_par_iter()
        .map(|p| {
            values
                .rep_view(crate::tensor::RepIndex(p))
                .expect("slice index in range")
                .into_owned()
                .singular_values()
        })
        .collect()
}

fn spectrum_singular_values(a: &RealTensor, spec: &TransformSpec) -> Result<Vec<DVector<f64>>> {
    let ahat = apply_l(a, spec)?;
    Ok(on_spectrum!(ahat.values(), |t| singular_values(t)))
}

/// Factors `A = U ∗ S ∗ V^H` with `U`, `V` `∗_L`-orthogonal and `S` f-diagonal.
#[derive(Clone, Debug)]
pub struct LFactors {
    pub u: RealTensor,
    pub s: RealTensor,
    pub v: RealTensor,
    /// `‖S(i,i,:,…,:)‖_F` for each diagonal tube.
    pub tube_norms: Vec<f64>,
    spec: TransformSpec,
}

fn full_factors<T: Domain>(
    svds: &[SliceSvd<T>],
    rows: usize,
    cols: usize,
    trailing: &[usize],
) -> Result<(Spectrum, Spectrum, Spectrum)> {
    let us: Vec<DMatrix<T>> = svds.iter().map(|s| s.u.clone()).collect();
    let vs: Vec<DMatrix<T>> = svds.iter().map(|s| s.v.clone()).collect();
    let ss: Vec<DMatrix<T>> = svds
        .iter()
        .map(|s| {
            let mut d = DMatrix::zeros(rows, cols);
            for (i, &sv) in s.sigma.iter().enumerate() {
                d[(i, i)] = T::from_real(sv);
            }
            d
        })
        .collect();
    Ok((
        T::wrap(DenseTensor::from_rep_matrices(trailing, &us)?),
        T::wrap(DenseTensor::from_rep_matrices(trailing, &ss)?),
        T::wrap(DenseTensor::from_rep_matrices(trailing, &vs)?),
    ))
}

/// Full `∗_L`-SVD: `U` is `I_1×I_1×…`, `S` is `I_1×I_2×…`, `V` is `I_2×I_2×…`.
pub fn t_svd(a: &RealTensor, spec: &TransformSpec) -> Result<LFactors> {
    let ahat = apply_l(a, spec)?;
    let (rows, cols) = (a.dims()[0], a.dims()[1]);
    let trailing = a.trailing_dims();
    let hermitian = ahat.is_hermitian();
    let partner = |p| spec.conjugate_partner(trailing, p);
    let (u, s, v) = on_spectrum!(ahat.values(), |t| {
        let svds = slice_svds(t, hermitian, &partner, true);
        full_factors(&svds, rows, cols, trailing)?
    });
    let u = back_to_real(u, spec)?;
    let s = back_to_real(s, spec)?;
    let v = back_to_real(v, spec)?;
    let tube_norms = (0..rows.min(cols))
        .map(|i| {
            s.as_slice()
                .chunks(s.slice_len())
                .map(|slice| slice[i + i * rows].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(LFactors {
        u,
        s,
        v,
        tube_norms,
        spec: spec.clone(),
    })
}

impl LFactors {
    pub fn spec(&self) -> &TransformSpec {
        &self.spec
    }

    /// `U ∗ S ∗ V^H`.
    pub fn reconstruct(&self) -> Result<RealTensor> {
        let vt = l_transpose(&self.v, &self.spec)?;
        l_product(&l_product(&self.u, &self.s, &self.spec)?, &vt, &self.spec)
    }

    /// Leading `k` factors `(U_k, S_k, V_k)`.
    pub fn leading(&self, k: usize) -> Result<(RealTensor, RealTensor, RealTensor)> {
        let (rows, cols) = (self.u.dims()[0], self.v.dims()[0]);
        if k == 0 || k > rows.min(cols) {
            return Err(Error::Parameter(format!(
                "truncation rank {k} outside 1..={}",
                rows.min(cols)
            )));
        }
        Ok((
            self.u.leading_block(rows, k)?,
            self.s.leading_block(k, k)?,
            self.v.leading_block(cols, k)?,
        ))
    }

    /// Rank-`k` approximation `U_k ∗ S_k ∗ V_k^H`.
    pub fn truncate(&self, k: usize) -> Result<RealTensor> {
        let (u, s, v) = self.leading(k)?;
        let vt = l_transpose(&v, &self.spec)?;
        l_product(&l_product(&u, &s, &self.spec)?, &vt, &self.spec)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankReport {
    /// Largest number of nonzero diagonal tubes of `S`.
    pub tubal: usize,
    /// Rank of each transform-domain slice, in `p`-order.
    pub multirank: Vec<usize>,
    pub average: f64,
}

/// Tubal rank, multirank and average rank. A singular value counts when it
/// exceeds `threshold` times the largest singular value over all slices.
pub fn ranks(a: &RealTensor, spec: &TransformSpec, threshold: f64) -> Result<RankReport> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::Parameter(format!("rank threshold {threshold}")));
    }
    let sv = spectrum_singular_values(a, spec)?;
    let sigma_max = sv.iter().flat_map(|s| s.iter().copied()).fold(0.0, f64::max);
    let cutoff = threshold * sigma_max;
    let multirank: Vec<usize> = sv
        .iter()
        .map(|s| {
            if sigma_max == 0.0 {
                0
            } else {
                s.iter().filter(|&&x| x > cutoff).count()
            }
        })
        .collect();
    let tubal = multirank.iter().copied().max().unwrap_or(0);
    let average = multirank.iter().sum::<usize>() as f64 / multirank.len().max(1) as f64;
    Ok(RankReport {
        tubal,
        multirank,
        average,
    })
}

/// Largest singular value over all transform-domain slices.
pub fn spectral_norm(a: &RealTensor, spec: &TransformSpec) -> Result<f64> {
    spec.require_unitary("spectral norm")?;
    let sv = spectrum_singular_values(a, spec)?;
    Ok(sv.iter().flat_map(|s| s.iter().copied()).fold(0.0, f64::max))
}

/// `α⁻¹ Σ_p ‖L(A)^{(p)}‖_*`.
pub fn nuclear_norm(a: &RealTensor, spec: &TransformSpec) -> Result<f64> {
    let alpha = spec.require_unitary("nuclear norm")?;
    let sv = spectrum_singular_values(a, spec)?;
    Ok(sv.iter().map(|s| s.sum()).sum::<f64>() / alpha)
}

fn shrink_slices<T: Domain>(svds: &[SliceSvd<T>], tau: f64, trailing: &[usize]) -> Result<Spectrum> {
    let slices: Vec<DMatrix<T>> = svds
        .iter()
        .map(|s| {
            let mut u = s.u.clone();
            for (j, &sv) in s.sigma.iter().enumerate() {
                let w = (sv - tau).max(0.0);
                u.column_mut(j).scale_mut(w);
            }
            u * s.v.adjoint()
        })
        .collect();
    Ok(T::wrap(DenseTensor::from_rep_matrices(trailing, &slices)?))
}

/// Singular value thresholding: the prox of `τ‖·‖_*` under `∗_L`.
pub fn svt(a: &RealTensor, tau: f64, spec: &TransformSpec) -> Result<RealTensor> {
    spec.require_unitary("SVT")?;
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::Parameter(format!("SVT threshold must be finite and nonnegative, got {tau}")));
    }
    let ahat = apply_l(a, spec)?;
    let trailing = a.trailing_dims();
    let hermitian = ahat.is_hermitian();
    let partner = |p| spec.conjugate_partner(trailing, p);
    let shrunk = on_spectrum!(ahat.values(), |t| {
        let svds = slice_svds(t, hermitian, &partner, false);
        shrink_slices(&svds, tau, trailing)?
    });
    back_to_real(shrunk, spec)
}
