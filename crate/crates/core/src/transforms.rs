//! The invertible mode-wise operator `L(X) = X ×_3 M_3 ⋯ ×_N M_N`.
//!
//! A [`TransformSpec`] fixes one matrix per transformed mode. Fourier and
//! orthogonal-DCT specs also carry fast FFT/DCT plans; the explicit matrices
//! are always materialized so both paths can be cross-checked.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::tensor::{fro_norm, mode_n_product, ComplexTensor, DenseTensor, RealTensor, Scalar};

/// Relative imaginary residual tolerated when a result is declared real.
pub const IMAG_RESIDUAL_TOL: f64 = 1e-9;

const INVERTIBILITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    /// `M_i = F_{I_i}`, unitary-scaled with `α_i = √I_i`.
    Fourier,
    /// `M_i = C_{I_i}`, orthogonal (`α_i = 1`).
    OrthogonalDct,
    /// `M_i = W⁻¹ C (I + Z)`, the exact c-product transform. Not unitary-scaled.
    CProduct,
    /// User-supplied real invertible matrices.
    Explicit,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Fourier => "fourier",
            TransformKind::OrthogonalDct => "orthogonal-dct",
            TransformKind::CProduct => "c-product",
            TransformKind::Explicit => "explicit",
        })
    }
}

/// Which code path [`apply_l_with`] uses for Fourier and DCT modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Fast,
    Explicit,
}

#[derive(Clone, Debug)]
enum ModeMatrices {
    Real {
        forward: DMatrix<f64>,
        inverse: DMatrix<f64>,
    },
    Complex {
        forward: DMatrix<Complex64>,
        inverse: DMatrix<Complex64>,
    },
}

#[derive(Clone)]
enum FastPlan {
    None,
    Fft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Dct(Arc<dyn TransformType2And3<f64>>),
}

#[derive(Clone)]
struct ModeTransform {
    mode: usize,
    size: usize,
    matrices: ModeMatrices,
    /// `α_i` when `M_i / α_i` is unitary.
    scale: Option<f64>,
    plan: FastPlan,
}

#[derive(Clone)]
pub struct TransformSpec {
    kind: TransformKind,
    modes: Vec<ModeTransform>,
}

impl fmt::Debug for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformSpec")
            .field("kind", &self.kind)
            .field(
                "modes",
                &self
                    .modes
                    .iter()
                    .map(|m| (m.mode, m.size))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl PartialEq for TransformSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.modes.len() == other.modes.len()
            && self.modes.iter().zip(&other.modes).all(|(a, b)| {
                a.mode == b.mode
                    && a.size == b.size
                    && match (&a.matrices, &b.matrices) {
                        (ModeMatrices::Real { forward: fa, .. }, ModeMatrices::Real { forward: fb, .. }) => {
                            self.kind != TransformKind::Explicit || fa == fb
                        }
                        (ModeMatrices::Complex { .. }, ModeMatrices::Complex { .. }) => true,
                        _ => false,
                    }
            })
    }
}

pub fn build_dct_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::Parameter("DCT size must be positive".into()));
    }
    let nf = n as f64;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let w = if i == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        w * ((i as f64) * (2.0 * j as f64 + 1.0) * PI / (2.0 * nf)).cos()
    }))
}

pub fn build_fourier_matrix(n: usize) -> Result<DMatrix<Complex64>> {
    if n == 0 {
        return Err(Error::Parameter("Fourier size must be positive".into()));
    }
    // reduce the exponent mod n before taking the angle
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let k = (i * j) % n;
        Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)
    }))
}

/// `M = W⁻¹ C (I + Z)` with `W = diag(C(:,1))` and `Z` the upshift matrix.
pub fn build_cproduct_matrix(n: usize) -> Result<DMatrix<f64>> {
    let c = build_dct_matrix(n)?;
    let mut upper = DMatrix::<f64>::identity(n, n);
    for i in 0..n.saturating_sub(1) {
        upper[(i, i + 1)] = 1.0;
    }
    let mut m = &c * upper;
    for i in 0..n {
        let w = c[(i, 0)];
        m.row_mut(i).scale_mut(1.0 / w);
    }
    Ok(m)
}

/// `M⁻¹ = (I + Z)⁻¹ Cᵀ W`.
pub fn build_cproduct_inverse(n: usize) -> Result<DMatrix<f64>> {
    let c = build_dct_matrix(n)?;
    // (I + Z)⁻¹ is upper triangular with alternating signs
    let upper_inv = DMatrix::from_fn(n, n, |i, j| {
        if j < i {
            0.0
        } else if (j - i) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    });
    let mut ct_w = c.transpose();
    for j in 0..n {
        let w = c[(j, 0)];
        ct_w.column_mut(j).scale_mut(w);
    }
    Ok(upper_inv * ct_w)
}

fn identity_residual<T: Scalar>(m: &DMatrix<T>, inv: &DMatrix<T>) -> f64 {
    let n = m.nrows();
    (m * inv - DMatrix::<T>::identity(n, n)).norm()
}

fn unitary_scale(m: &DMatrix<f64>) -> Option<f64> {
    let n = m.nrows();
    let gram = m * m.transpose();
    let c = gram.trace() / n as f64;
    if c <= 0.0 {
        return None;
    }
    let dev = (gram - DMatrix::<f64>::identity(n, n) * c).norm();
    (dev <= INVERTIBILITY_TOL * c.max(1.0)).then(|| c.sqrt())
}

impl ModeTransform {
    fn standard(kind: TransformKind, mode: usize, size: usize) -> Result<Self> {
        Ok(match kind {
            TransformKind::Fourier => {
                let forward = build_fourier_matrix(size)?;
                let inverse = forward.adjoint() / Complex64::new(size as f64, 0.0);
                let mut planner = FftPlanner::new();
                ModeTransform {
                    mode,
                    size,
                    matrices: ModeMatrices::Complex { forward, inverse },
                    scale: Some((size as f64).sqrt()),
                    plan: FastPlan::Fft {
                        forward: planner.plan_fft_forward(size),
                        inverse: planner.plan_fft_inverse(size),
                    },
                }
            }
            TransformKind::OrthogonalDct => {
                let forward = build_dct_matrix(size)?;
                let inverse = forward.transpose();
                ModeTransform {
                    mode,
                    size,
                    matrices: ModeMatrices::Real { forward, inverse },
                    scale: Some(1.0),
                    plan: FastPlan::Dct(DctPlanner::new().plan_dct2(size)),
                }
            }
            TransformKind::CProduct => ModeTransform {
                mode,
                size,
                matrices: ModeMatrices::Real {
                    forward: build_cproduct_matrix(size)?,
                    inverse: build_cproduct_inverse(size)?,
                },
                scale: None,
                plan: FastPlan::None,
            },
            TransformKind::Explicit => {
                return Err(Error::Parameter(
                    "explicit transforms are built with TransformSpec::explicit".into(),
                ))
            }
        })
    }
}

impl TransformSpec {
    /// Spec of `kind` over all trailing modes (`2..N`, 0-based) of `dims`.
    pub fn new(kind: TransformKind, dims: &[usize]) -> Result<Self> {
        let modes: Vec<usize> = (2..dims.len()).collect();
        Self::with_modes(kind, dims, &modes)
    }

    pub fn fourier(dims: &[usize]) -> Result<Self> {
        Self::new(TransformKind::Fourier, dims)
    }

    pub fn dct(dims: &[usize]) -> Result<Self> {
        Self::new(TransformKind::OrthogonalDct, dims)
    }

    pub fn cproduct(dims: &[usize]) -> Result<Self> {
        Self::new(TransformKind::CProduct, dims)
    }

    /// Spec restricted to `modes` (0-based, each ≥ 2, strictly increasing).
    pub fn with_modes(kind: TransformKind, dims: &[usize], modes: &[usize]) -> Result<Self> {
        Self::check_mode_list(dims.len(), modes)?;
        let modes = modes
            .iter()
            .map(|&m| ModeTransform::standard(kind, m, dims[m]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, modes })
    }

    /// Spec from explicit real matrices, one `(mode, M)` pair per transformed mode.
    pub fn explicit(matrices: Vec<(usize, DMatrix<f64>)>) -> Result<Self> {
        let mut modes = Vec::with_capacity(matrices.len());
        let mut last = None;
        for (mode, forward) in matrices {
            if mode < 2 || last.is_some_and(|l| mode <= l) {
                return Err(Error::Parameter(format!(
                    "explicit transform modes must be ≥ 2 and increasing, got {mode}"
                )));
            }
            last = Some(mode);
            if !forward.is_square() || forward.nrows() == 0 {
                return Err(Error::Transform(format!(
                    "mode {mode} matrix is {:?}, expected square",
                    forward.shape()
                )));
            }
            let inverse = forward
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Transform(format!("mode {mode} matrix is singular")))?;
            let residual = identity_residual(&forward, &inverse);
            if residual >= INVERTIBILITY_TOL {
                return Err(Error::Transform(format!(
                    "mode {mode} matrix is ill-conditioned: ‖MM⁻¹ − I‖ = {residual:.2e}"
                )));
            }
            let scale = unitary_scale(&forward);
            modes.push(ModeTransform {
                mode,
                size: forward.nrows(),
                matrices: ModeMatrices::Real { forward, inverse },
                scale,
                plan: FastPlan::None,
            });
        }
        Ok(Self {
            kind: TransformKind::Explicit,
            modes,
        })
    }

    fn check_mode_list(order: usize, modes: &[usize]) -> Result<()> {
        for (i, &m) in modes.iter().enumerate() {
            if m < 2 || m >= order {
                return Err(Error::Mode { mode: m, order });
            }
            if i > 0 && m <= modes[i - 1] {
                return Err(Error::Parameter(format!(
                    "transform modes must be strictly increasing: {modes:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn modes(&self) -> impl Iterator<Item = usize> + '_ {
        self.modes.iter().map(|m| m.mode)
    }

    /// True when the transform domain is complex.
    pub fn is_complex(&self) -> bool {
        self.modes
            .iter()
            .any(|m| matches!(m.matrices, ModeMatrices::Complex { .. }))
    }

    pub fn is_unitary_scaled(&self) -> bool {
        self.modes.iter().all(|m| m.scale.is_some())
    }

    /// Per-mode scales `α_i` (None for modes that are not unitary-scaled).
    pub fn mode_scales(&self) -> Vec<Option<f64>> {
        self.modes.iter().map(|m| m.scale).collect()
    }

    /// Norm factor with `‖A‖_F² = ‖L(A)‖_F² / α`, i.e. `α = ∏ α_i²`.
    pub fn alpha(&self) -> Option<f64> {
        self.modes
            .iter()
            .try_fold(1.0, |acc, m| m.scale.map(|s| acc * s * s))
    }

    pub(crate) fn require_unitary(&self, op: &'static str) -> Result<f64> {
        self.alpha().ok_or_else(|| Error::UnsupportedSpec {
            op,
            kind: self.kind.to_string(),
        })
    }

    /// Forward matrix of `mode`, promoted to complex.
    pub fn forward_matrix(&self, mode: usize) -> Option<DMatrix<Complex64>> {
        self.modes.iter().find(|m| m.mode == mode).map(|m| match &m.matrices {
            ModeMatrices::Real { forward, .. } => forward.map(|v| Complex64::new(v, 0.0)),
            ModeMatrices::Complex { forward, .. } => forward.clone(),
        })
    }

    /// Forward matrix of `mode` for real specs.
    pub fn real_forward_matrix(&self, mode: usize) -> Option<&DMatrix<f64>> {
        self.modes.iter().find(|m| m.mode == mode).and_then(|m| match &m.matrices {
            ModeMatrices::Real { forward, .. } => Some(forward),
            ModeMatrices::Complex { .. } => None,
        })
    }

    pub fn check_dims(&self, dims: &[usize]) -> Result<()> {
        for m in &self.modes {
            if m.mode >= dims.len() || dims[m.mode] != m.size {
                return Err(Error::Transform(format!(
                    "spec expects size {} on mode {}, tensor has dims {dims:?}",
                    m.size, m.mode
                )));
            }
        }
        Ok(())
    }

    /// Representative-matrix index holding the complex conjugate of slice `p`
    /// when a real tensor is Fourier-transformed.
    pub fn conjugate_partner(&self, trailing: &[usize], p: usize) -> usize {
        let mut rem = p;
        let mut stride = 1;
        let mut partner = 0;
        for (t, &d) in trailing.iter().enumerate() {
            let k = rem % d;
            rem /= d;
            let flips = self.modes.iter().any(|m| {
                m.mode == t + 2 && matches!(m.matrices, ModeMatrices::Complex { .. })
            });
            let kp = if flips { (d - k) % d } else { k };
            partner += kp * stride;
            stride *= d;
        }
        partner
    }
}

/// Values living in the transform domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Real(RealTensor),
    Complex(ComplexTensor),
}

impl Spectrum {
    pub fn dims(&self) -> &[usize] {
        match self {
            Spectrum::Real(t) => t.dims(),
            Spectrum::Complex(t) => t.dims(),
        }
    }

    pub fn to_complex(&self) -> ComplexTensor {
        match self {
            Spectrum::Real(t) => t.to_complex(),
            Spectrum::Complex(t) => t.clone(),
        }
    }

    pub fn fro_norm(&self) -> f64 {
        match self {
            Spectrum::Real(t) => fro_norm(t),
            Spectrum::Complex(t) => fro_norm(t),
        }
    }
}

/// `L(A)` together with the spec that produced it.
#[derive(Clone, Debug)]
pub struct TransformedTensor<'s> {
    values: Spectrum,
    spec: &'s TransformSpec,
    hermitian: bool,
}

impl<'s> TransformedTensor<'s> {
    /// Wraps transform-domain values. `real_source` declares that the values are
    /// the image of a real tensor, which enables conjugate-pair bookkeeping and the
    /// real-output check on inversion.
    pub fn new(values: Spectrum, spec: &'s TransformSpec, real_source: bool) -> Result<Self> {
        spec.check_dims(values.dims())?;
        if real_source && !spec.is_complex() && matches!(values, Spectrum::Complex(_)) {
            return Err(Error::Transform(
                "real spec with complex values cannot have a real source".into(),
            ));
        }
        Ok(Self {
            hermitian: real_source && matches!(values, Spectrum::Complex(_)),
            values,
            spec,
        })
    }

    pub fn spec(&self) -> &'s TransformSpec {
        self.spec
    }

    pub fn values(&self) -> &Spectrum {
        &self.values
    }

    pub fn into_values(self) -> Spectrum {
        self.values
    }

    pub fn dims(&self) -> &[usize] {
        self.values.dims()
    }

    /// True for the Fourier image of a real tensor: slice `p` and its
    /// [`TransformSpec::conjugate_partner`] are complex conjugates.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// True when the inverse is expected to be real.
    pub fn has_real_source(&self) -> bool {
        self.hermitian || matches!(self.values, Spectrum::Real(_))
    }

    pub fn conjugate_partner(&self, p: usize) -> usize {
        self.spec.conjugate_partner(&self.dims()[2..], p)
    }

    /// Slice-wise product `L(A) △ L(B)`.
    pub fn facewise(&self, other: &TransformedTensor<'_>) -> Result<TransformedTensor<'s>> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let values = match (&self.values, &other.values) {
            (Spectrum::Real(a), Spectrum::Real(b)) => {
                Spectrum::Real(crate::tensor::facewise_product(a, b)?)
            }
            (a, b) => Spectrum::Complex(crate::tensor::facewise_product(
                &a.to_complex(),
                &b.to_complex(),
            )?),
        };
        Ok(TransformedTensor {
            values,
            spec: self.spec,
            hermitian: self.hermitian && other.hermitian,
        })
    }
}

/// Runs `f` on a buffer holding every mode-`n` fiber contiguously, then scatters back.
fn along_mode<T: Copy + Default>(data: &mut [T], dims: &[usize], n: usize, f: impl FnOnce(&mut [T])) {
    let left: usize = dims[..n].iter().product();
    let mid = dims[n];
    let right: usize = dims[n + 1..].iter().product();
    let mut buf = vec![T::default(); data.len()];
    for r in 0..right {
        for l in 0..left {
            let fiber = (r * left + l) * mid;
            for i in 0..mid {
                buf[fiber + i] = data[l + i * left + r * left * mid];
            }
        }
    }
    f(&mut buf);
    for r in 0..right {
        for l in 0..left {
            let fiber = (r * left + l) * mid;
            for i in 0..mid {
                data[l + i * left + r * left * mid] = buf[fiber + i];
            }
        }
    }
}

fn dct_forward(buf: &mut [f64], plan: &Arc<dyn TransformType2And3<f64>>, n: usize) {
    let (w0, w) = ((1.0 / n as f64).sqrt(), (2.0 / n as f64).sqrt());
    let mut scratch = vec![0.0; plan.get_scratch_len()];
    for fiber in buf.chunks_mut(n) {
        plan.process_dct2_with_scratch(fiber, &mut scratch);
        fiber[0] *= w0;
        fiber[1..].iter_mut().for_each(|v| *v *= w);
    }
}

fn dct_inverse(buf: &mut [f64], plan: &Arc<dyn TransformType2And3<f64>>, n: usize) {
    let (w0, w) = ((1.0 / n as f64).sqrt(), (2.0 / n as f64).sqrt());
    let mut scratch = vec![0.0; plan.get_scratch_len()];
    for fiber in buf.chunks_mut(n) {
        // DCT-III halves the first coefficient
        fiber[0] *= 2.0 * w0;
        fiber[1..].iter_mut().for_each(|v| *v *= w);
        plan.process_dct3_with_scratch(fiber, &mut scratch);
    }
}

fn apply_real(x: &mut RealTensor, spec: &TransformSpec, backend: Backend, inverse: bool) -> Result<()> {
    let order: Box<dyn Iterator<Item = &ModeTransform>> = if inverse {
        Box::new(spec.modes.iter().rev())
    } else {
        Box::new(spec.modes.iter())
    };
    for m in order {
        let ModeMatrices::Real { forward, inverse: inv } = &m.matrices else {
            return Err(Error::Transform("complex mode in real transform path".into()));
        };
        match (&m.plan, backend) {
            (FastPlan::Dct(plan), Backend::Fast) => {
                let dims = x.dims().to_vec();
                along_mode(x.as_mut_slice(), &dims, m.mode, |buf| {
                    if inverse {
                        dct_inverse(buf, plan, m.size)
                    } else {
                        dct_forward(buf, plan, m.size)
                    }
                });
            }
            _ => {
                *x = mode_n_product(x, if inverse { inv } else { forward }, m.mode)?;
            }
        }
    }
    Ok(())
}

fn apply_complex(x: &mut ComplexTensor, spec: &TransformSpec, backend: Backend, inverse: bool) -> Result<()> {
    let order: Box<dyn Iterator<Item = &ModeTransform>> = if inverse {
        Box::new(spec.modes.iter().rev())
    } else {
        Box::new(spec.modes.iter())
    };
    for m in order {
        match (&m.plan, backend) {
            (FastPlan::Fft { forward, inverse: inv }, Backend::Fast) => {
                let dims = x.dims().to_vec();
                along_mode(x.as_mut_slice(), &dims, m.mode, |buf| {
                    if inverse {
                        inv.process(buf);
                        let s = 1.0 / m.size as f64;
                        buf.iter_mut().for_each(|v| *v *= s);
                    } else {
                        forward.process(buf);
                    }
                });
            }
            (FastPlan::Dct(plan), Backend::Fast) => {
                // real and imaginary parts transform independently
                let dims = x.dims().to_vec();
                let mut re: Vec<f64> = x.as_slice().iter().map(|v| v.re).collect();
                let mut im: Vec<f64> = x.as_slice().iter().map(|v| v.im).collect();
                for part in [&mut re, &mut im] {
                    along_mode(part, &dims, m.mode, |buf| {
                        if inverse {
                            dct_inverse(buf, plan, m.size)
                        } else {
                            dct_forward(buf, plan, m.size)
                        }
                    });
                }
                for ((v, r), i) in x.as_mut_slice().iter_mut().zip(re).zip(im) {
                    *v = Complex64::new(r, i);
                }
            }
            _ => {
                let mat = match (&m.matrices, inverse) {
                    (ModeMatrices::Real { forward, .. }, false) => forward.map(Complex64::from),
                    (ModeMatrices::Real { inverse, .. }, true) => inverse.map(Complex64::from),
                    (ModeMatrices::Complex { forward, .. }, false) => forward.clone(),
                    (ModeMatrices::Complex { inverse, .. }, true) => inverse.clone(),
                };
                *x = mode_n_product(x, &mat, m.mode)?;
            }
        }
    }
    Ok(())
}

/// `L(x)` using the fast backend where available.
pub fn apply_l<'s, T: Scalar>(x: &DenseTensor<T>, spec: &'s TransformSpec) -> Result<TransformedTensor<'s>> {
    apply_l_with(x, spec, Backend::Fast)
}

pub fn apply_l_with<'s, T: Scalar>(
    x: &DenseTensor<T>,
    spec: &'s TransformSpec,
    backend: Backend,
) -> Result<TransformedTensor<'s>> {
    spec.check_dims(x.dims())?;
    let values = if T::IS_COMPLEX || spec.is_complex() {
        let mut z = x.to_complex();
        apply_complex(&mut z, spec, backend, false)?;
        Spectrum::Complex(z)
    } else {
        let mut r = x.real_part();
        apply_real(&mut r, spec, backend, false)?;
        Spectrum::Real(r)
    };
    Ok(TransformedTensor {
        hermitian: !T::IS_COMPLEX && matches!(values, Spectrum::Complex(_)),
        values,
        spec,
    })
}

/// `L⁻¹(x̂)` without discarding anything.
pub fn apply_l_inv_complex(xhat: &TransformedTensor<'_>) -> Result<ComplexTensor> {
    let mut z = xhat.values.to_complex();
    apply_complex(&mut z, xhat.spec, Backend::Fast, true)?;
    Ok(z)
}

/// `L⁻¹(x̂)` as a real tensor.
///
/// Complex results must have `‖Im‖_F / ‖result‖_F` below [`IMAG_RESIDUAL_TOL`];
/// the residual is then dropped.
pub fn apply_l_inv(xhat: &TransformedTensor<'_>) -> Result<RealTensor> {
    match &xhat.values {
        Spectrum::Real(r) => {
            let mut out = r.clone();
            apply_real(&mut out, xhat.spec, Backend::Fast, true)?;
            Ok(out)
        }
        Spectrum::Complex(_) => {
            let z = apply_l_inv_complex(xhat)?;
            let total = fro_norm(&z);
            let imag = z.imag_norm();
            if imag > IMAG_RESIDUAL_TOL * total {
                return Err(Error::NumericConsistency {
                    residual: imag / total,
                    threshold: IMAG_RESIDUAL_TOL,
                });
            }
            Ok(z.real_part())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
        (a - b).iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    #[test]
    fn dct_matrix_examples() {
        assert_eq!(build_dct_matrix(1).unwrap(), DMatrix::from_element(1, 1, 1.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c2 = build_dct_matrix(2).unwrap();
        assert!(max_dev(&c2, &DMatrix::from_row_slice(2, 2, &[h, h, h, -h])) < 1e-15);
        for n in [2, 3, 4, 7] {
            let c = build_dct_matrix(n).unwrap();
            assert!((&c * c.transpose() - DMatrix::identity(n, n)).norm() < 1e-12);
        }
        assert!(build_dct_matrix(0).is_err());
    }

    #[test]
    fn fourier_matrix_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(build_fourier_matrix(1).unwrap()[(0, 0)], one);
        let f2 = build_fourier_matrix(2).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[one, one, one, -one]);
        assert!(max_dev(&f2, &expected) < 1e-15);
        let f4 = build_fourier_matrix(4).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let col: Vec<_> = f4.column(1).iter().copied().collect();
        for (got, want) in col.iter().zip([one, -i, -one, i]) {
            assert!((got - want).norm() < 1e-15);
        }
        for n in [3, 4, 6] {
            let f = build_fourier_matrix(n).unwrap();
            let gram = &f * f.adjoint();
            let target = DMatrix::<Complex64>::identity(n, n) * Complex64::new(n as f64, 0.0);
            assert!((gram - target).norm() < 1e-10);
        }
    }

    #[test]
    fn cproduct_matrix_examples() {
        assert!((build_cproduct_matrix(1).unwrap()[(0, 0)] - 1.0).abs() < 1e-15);
        let m2 = build_cproduct_matrix(2).unwrap();
        assert!(max_dev(&m2, &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 0.0])) < 1e-14);
        let inv2 = build_cproduct_inverse(2).unwrap();
        assert!(max_dev(&inv2, &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, -0.5])) < 1e-14);
        for n in [3, 4, 5] {
            let m = build_cproduct_matrix(n).unwrap();
            let inv = build_cproduct_inverse(n).unwrap();
            assert!(identity_residual(&m, &inv) < 1e-12);
        }
    }

    #[test]
    fn spec_scales() {
        let dims = [2, 2, 4, 3];
        let f = TransformSpec::fourier(&dims).unwrap();
        assert!(f.is_complex() && f.is_unitary_scaled());
        assert!((f.alpha().unwrap() - 12.0).abs() < 1e-12);
        let d = TransformSpec::dct(&dims).unwrap();
        assert_eq!(d.alpha(), Some(1.0));
        let c = TransformSpec::cproduct(&dims).unwrap();
        assert!(!c.is_unitary_scaled());
        assert_eq!(c.alpha(), None);
        let only3 = TransformSpec::with_modes(TransformKind::Fourier, &dims, &[2]).unwrap();
        assert!((only3.alpha().unwrap() - 4.0).abs() < 1e-12);
        assert!(TransformSpec::with_modes(TransformKind::Fourier, &dims, &[1]).is_err());
        assert!(TransformSpec::with_modes(TransformKind::Fourier, &dims, &[3, 2]).is_err());
    }

    #[test]
    fn explicit_spec_detects_scaling_and_singularity() {
        let h = build_dct_matrix(3).unwrap() * 2.0;
        let s = TransformSpec::explicit(vec![(2, h)]).unwrap();
        assert!((s.mode_scales()[0].unwrap() - 2.0).abs() < 1e-12);
        let cp = TransformSpec::explicit(vec![(2, build_cproduct_matrix(3).unwrap())]).unwrap();
        assert!(!cp.is_unitary_scaled());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(TransformSpec::explicit(vec![(2, singular)]).is_err());
    }

    #[test]
    fn apply_examples() {
        let z = RealTensor::zeros(&[2, 2, 3]).unwrap();
        for spec in [
            TransformSpec::fourier(z.dims()).unwrap(),
            TransformSpec::dct(z.dims()).unwrap(),
            TransformSpec::cproduct(z.dims()).unwrap(),
        ] {
            let zh = apply_l(&z, &spec).unwrap();
            assert_eq!(zh.values().fro_norm(), 0.0);
            assert_eq!(apply_l_inv(&zh).unwrap(), z);
        }

        let tube = RealTensor::new(vec![1, 1, 2], vec![1.0, 2.0]).unwrap();
        let spec = TransformSpec::cproduct(tube.dims()).unwrap();
        let th = apply_l(&tube, &spec).unwrap();
        let Spectrum::Real(v) = th.values() else { panic!("c-product domain is real") };
        assert!((v.as_slice()[0] - 5.0).abs() < 1e-14 && (v.as_slice()[1] - 1.0).abs() < 1e-14);

        let five_one = RealTensor::new(vec![1, 1, 2], vec![5.0, 1.0]).unwrap();
        let wrapped = TransformedTensor::new(Spectrum::Real(five_one), &spec, true).unwrap();
        let back = apply_l_inv(&wrapped).unwrap();
        assert!((back.as_slice()[0] - 1.0).abs() < 1e-14 && (back.as_slice()[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_dft_of_constant_tube() {
        let n = 5;
        let spec = TransformSpec::fourier(&[1, 1, n]).unwrap();
        let ones = ComplexTensor::ones(&[1, 1, n]).unwrap();
        let xhat = TransformedTensor::new(Spectrum::Complex(ones), &spec, true).unwrap();
        let e1 = apply_l_inv(&xhat).unwrap();
        for (k, v) in e1.as_slice().iter().enumerate() {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn corrupted_spectrum_is_rejected() {
        let spec = TransformSpec::fourier(&[1, 1, 4]).unwrap();
        let mut v = ComplexTensor::zeros(&[1, 1, 4]).unwrap();
        v.as_mut_slice()[1] = Complex64::new(1.0, 0.0);
        let xhat = TransformedTensor::new(Spectrum::Complex(v), &spec, true).unwrap();
        assert!(matches!(apply_l_inv(&xhat), Err(Error::NumericConsistency { .. })));
        assert!(apply_l_inv_complex(&xhat).is_ok());
    }

    #[test]
    fn shape_mismatch_is_a_transform_error() {
        let spec = TransformSpec::fourier(&[2, 2, 3]).unwrap();
        let x = RealTensor::zeros(&[2, 2, 4]).unwrap();
        assert!(matches!(apply_l(&x, &spec), Err(Error::Transform(_))));
    }

    #[test]
    fn conjugate_partners() {
        let spec = TransformSpec::fourier(&[1, 1, 4, 3]).unwrap();
        let trailing = [4, 3];
        // (1, 2) ↔ (3, 1)
        assert_eq!(spec.conjugate_partner(&trailing, 1 + 2 * 4), 3 + 4);
        assert_eq!(spec.conjugate_partner(&trailing, 0), 0);
        assert_eq!(spec.conjugate_partner(&trailing, 2), 2);
        let only3 = TransformSpec::with_modes(TransformKind::Fourier, &[1, 1, 4, 3], &[2]).unwrap();
        assert_eq!(only3.conjugate_partner(&trailing, 1 + 2 * 4), 3 + 2 * 4);
    }
}
