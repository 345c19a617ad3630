//! Generalized transform-domain tensor-tensor products for tensors of any order.
//!
//! The `∗_L` product multiplies two tensors by mapping them into a transform
//! domain with an invertible mode-wise operator `L` (Fourier, orthogonal DCT,
//! or the c-product transform), multiplying matching representative matrices,
//! and mapping back. On top of that product this crate provides the `∗_L`-SVD,
//! tensor ranks, spectral and nuclear norms, singular value thresholding, and
//! an accelerated proximal-gradient solver for low-rank tensor completion.

pub mod algebra;
pub mod btph;
pub mod completion;
pub mod error;
pub mod io;
pub mod synthetic;
pub mod tensor;
pub mod transforms;

pub use algebra::{
    identity_tensor, is_orthogonal, l_product, l_transpose, nuclear_norm, ranks, spectral_norm, svt,
    t_svd, LFactors, RankReport, RANK_THRESHOLD,
};
pub use completion::{
    gradient_step, pga_complete, pga_complete_with, project_complement, project_omega, psnr, rse,
    rse_with, sample_mask, CompletionConfig, CompletionStatus, CompletionTrace, IterationRecord,
    ObservationMask, RseDenominator,
};
pub use error::{Error, Result};
pub use tensor::{
    facewise_product, fro_norm, inner_product, mode_n_fold, mode_n_product, mode_n_unfold,
    rep_matrix, ComplexTensor, DenseTensor, RealTensor, RepIndex, Scalar,
};
pub use transforms::{
    apply_l, apply_l_inv, apply_l_inv_complex, apply_l_with, build_cproduct_inverse,
    build_cproduct_matrix, build_dct_matrix, build_fourier_matrix, Backend, Spectrum,
    TransformKind, TransformSpec, TransformedTensor,
};
