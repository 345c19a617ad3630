//! Low-tubal-rank tensor completion by accelerated proximal gradient.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::svt;
use crate::error::{Error, Result};
use crate::tensor::{fro_norm, DenseTensor, RealTensor};
use crate::transforms::TransformSpec;

/// The observed index set `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationMask {
    mask: DenseTensor<bool>,
    known: usize,
}

impl ObservationMask {
    pub fn new(mask: DenseTensor<bool>) -> Self {
        let known = mask.as_slice().iter().filter(|&&b| b).count();
        Self { mask, known }
    }

    pub fn full(dims: &[usize]) -> Result<Self> {
        Ok(Self::new(DenseTensor::filled(dims, true)?))
    }

    pub fn empty(dims: &[usize]) -> Result<Self> {
        Ok(Self::new(DenseTensor::filled(dims, false)?))
    }

    pub fn dims(&self) -> &[usize] {
        self.mask.dims()
    }

    pub fn as_tensor(&self) -> &DenseTensor<bool> {
        &self.mask
    }

    pub fn into_tensor(self) -> DenseTensor<bool> {
        self.mask
    }

    /// `|Ω|`.
    pub fn known_count(&self) -> usize {
        self.known
    }

    pub fn sampling_ratio(&self) -> f64 {
        self.known as f64 / self.mask.len() as f64
    }

    pub fn is_observed(&self, offset: usize) -> bool {
        self.mask.as_slice()[offset]
    }

    fn check(&self, dims: &[usize]) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::shape(format!(
                "mask dims {:?} differ from data dims {dims:?}",
                self.dims()
            )));
        }
        Ok(())
    }
}

/// `P_Ω(x)`: observed entries kept, others zeroed.
pub fn project_omega(x: &RealTensor, mask: &ObservationMask) -> Result<RealTensor> {
    mask.check(x.dims())?;
    x.zip_map(&mask.mask, |&v, &keep| if keep { v } else { 0.0 })
}

/// `P_{Ω^c}(x)`.
pub fn project_complement(x: &RealTensor, mask: &ObservationMask) -> Result<RealTensor> {
    mask.check(x.dims())?;
    x.zip_map(&mask.mask, |&v, &keep| if keep { 0.0 } else { v })
}

/// Gradient step with unit Lipschitz constant: `Y − (P_Ω(Y) − P_Ω(M)) = P_{Ω^c}(Y) + P_Ω(M)`.
pub fn gradient_step(y: &RealTensor, m: &RealTensor, mask: &ObservationMask) -> Result<RealTensor> {
    mask.check(y.dims())?;
    mask.check(m.dims())?;
    let data = (y.as_slice().iter().zip(m.as_slice()))
        .zip(mask.mask.as_slice())
        .map(|((&yv, &mv), &keep)| if keep { mv } else { yv })
        .collect();
    RealTensor::new(y.dims().to_vec(), data)
}

/// Exactly `round(sr · ∏dims)` observed entries drawn uniformly without replacement.
pub fn sample_mask(dims: &[usize], sr: f64, seed: u64) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&sr) {
        return Err(Error::Parameter(format!("sampling ratio {sr} outside [0, 1]")));
    }
    let mut mask = DenseTensor::filled(dims, false)?;
    let n = mask.len();
    let k = ((sr * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in rand::seq::index::sample(&mut rng, n, k) {
        mask.as_mut_slice()[i] = true;
    }
    Ok(ObservationMask::new(mask))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RseDenominator {
    /// `‖original − obtained‖² / ‖obtained‖²`.
    #[default]
    Obtained,
    /// `‖original − obtained‖² / ‖original‖²`.
    Original,
}

#[derive(Clone, Debug)]
pub struct CompletionConfig {
    pub spec: TransformSpec,
    pub nu: f64,
    /// Initial shrinkage; `None` means `ν‖P_Ω(M)‖_F`.
    pub mu0: Option<f64>,
    /// Floor `μ̄ = mu_bar_ratio · μ₀`.
    pub mu_bar_ratio: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Overwrite observed entries of the result with the data.
    pub reimpose_observed: bool,
    pub rse_denominator: RseDenominator,
}

impl CompletionConfig {
    pub fn new(spec: TransformSpec) -> Self {
        Self {
            spec,
            nu: 0.9,
            mu0: None,
            mu_bar_ratio: 1e-4,
            tol: 1e-4,
            max_iters: 100,
            reimpose_observed: false,
            rse_denominator: RseDenominator::Obtained,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::Parameter(format!("nu must lie in (0, 1), got {}", self.nu)));
        }
        if !(self.mu_bar_ratio >= 0.0 && self.mu_bar_ratio <= 1.0) {
            return Err(Error::Parameter(format!(
                "mu-bar ratio must lie in [0, 1], got {}",
                self.mu_bar_ratio
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Parameter(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0 >= 0.0 && mu0.is_finite()) {
                return Err(Error::Parameter(format!("mu0 must be finite and nonnegative, got {mu0}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub mu: f64,
    pub t: f64,
    /// `‖Y^k − X^{k+1}‖_F / ‖X^{k+1}‖_F`.
    pub rel_change: f64,
    pub rse: Option<f64>,
    pub psnr: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompletionStatus {
    Converged,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompletionTrace {
    pub records: Vec<IterationRecord>,
    pub status: CompletionStatus,
    pub mu0: f64,
    pub mu_bar: f64,
}

impl CompletionTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// CSV with columns `iter,mu,t,rel_change,rse,psnr`; metrics are empty when unavailable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,mu,t,rel_change,rse,psnr\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.records {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{},{}\n",
                r.iter,
                r.mu,
                r.t,
                r.rel_change,
                opt(r.rse),
                opt(r.psnr)
            ));
        }
        out
    }
}

/// Next momentum weight `(1 + √(4t² + 1)) / 2`.
pub fn next_t(t: f64) -> f64 {
    (1.0 + (4.0 * t * t + 1.0).sqrt()) / 2.0
}

/// Shrinkage used at iteration `k ≥ 1`: `max(ν^k μ₀, μ̄)`.
pub fn mu_schedule(mu0: f64, nu: f64, mu_bar: f64, k: usize) -> f64 {
    let exp = i32::try_from(k).unwrap_or(i32::MAX);
    (mu0 * nu.powi(exp)).max(mu_bar)
}

/// Completes `m` from its entries on `mask`. Entries of `m` outside the mask are ignored.
pub fn pga_complete(
    m: &RealTensor,
    mask: &ObservationMask,
    cfg: &CompletionConfig,
    ground_truth: Option<&RealTensor>,
) -> Result<(RealTensor, CompletionTrace)> {
    pga_complete_with(m, mask, cfg, ground_truth, |_, _| {})
}

/// [`pga_complete`] with a callback receiving each record and the new iterate.
pub fn pga_complete_with(
    m: &RealTensor,
    mask: &ObservationMask,
    cfg: &CompletionConfig,
    ground_truth: Option<&RealTensor>,
    mut on_iter: impl FnMut(&IterationRecord, &RealTensor),
) -> Result<(RealTensor, CompletionTrace)> {
    cfg.validate()?;
    cfg.spec.require_unitary("SVT")?;
    cfg.spec.check_dims(m.dims())?;
    if let Some(g) = ground_truth {
        m.check_same_dims(g)?;
    }
    let observed = project_omega(m, mask)?;
    let mu0 = cfg.mu0.unwrap_or(cfg.nu * fro_norm(&observed));
    let mu_bar = cfg.mu_bar_ratio * mu0;

    let mut x_prev = RealTensor::zeros(m.dims())?;
    let mut x = x_prev.clone();
    let (mut t_prev, mut t) = (1.0, 1.0);
    let mut records = Vec::new();
    let mut status = CompletionStatus::MaxIters;

    for k in 1..=cfg.max_iters {
        let mu = mu_schedule(mu0, cfg.nu, mu_bar, k);
        let w = (t_prev - 1.0) / t;
        let y = x.axpy(w, &(&x - &x_prev))?;
        let g = gradient_step(&y, m, mask)?;
        let x_next = svt(&g, mu, &cfg.spec)?;

        let next_norm = fro_norm(&x_next);
        let rel_change = if next_norm > 0.0 {
            fro_norm(&(&y - &x_next)) / next_norm
        } else if fro_norm(&g) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let (rse_k, psnr_k) = match ground_truth {
            Some(truth) => (
                rse_with(&x_next, truth, cfg.rse_denominator).ok(),
                Some(psnr(&x_next, truth)?),
            ),
            None => (None, None),
        };
        let record = IterationRecord {
            iter: k,
            mu,
            t,
            rel_change,
            rse: rse_k,
            psnr: psnr_k,
        };
        on_iter(&record, &x_next);
        records.push(record);

        x_prev = std::mem::replace(&mut x, x_next);
        t_prev = t;
        t = next_t(t);
        if rel_change <= cfg.tol {
            status = CompletionStatus::Converged;
            break;
        }
    }

    if cfg.reimpose_observed {
        x = &project_complement(&x, mask)? + &observed;
    }
    Ok((
        x,
        CompletionTrace {
            records,
            status,
            mu0,
            mu_bar,
        },
    ))
}

/// Relative squared error with the obtained tensor in the denominator.
pub fn rse(obtained: &RealTensor, original: &RealTensor) -> Result<f64> {
    rse_with(obtained, original, RseDenominator::Obtained)
}

pub fn rse_with(obtained: &RealTensor, original: &RealTensor, denominator: RseDenominator) -> Result<f64> {
    obtained.check_same_dims(original)?;
    let denom = match denominator {
        RseDenominator::Obtained => fro_norm(obtained),
        RseDenominator::Original => fro_norm(original),
    };
    if denom == 0.0 {
        return Err(Error::UndefinedMetric("RSE with a zero denominator tensor"));
    }
    let diff = fro_norm(&(original - obtained));
    Ok((diff / denom).powi(2))
}

/// `10 log₁₀(Max² / ‖obtained − original‖_F²)` with `Max` the largest entry of
/// `obtained`; `+∞` when the tensors are identical.
pub fn psnr(obtained: &RealTensor, original: &RealTensor) -> Result<f64> {
    obtained.check_same_dims(original)?;
    let diff2 = fro_norm(&(obtained - original)).powi(2);
    if diff2 == 0.0 {
        return Ok(f64::INFINITY);
    }
    let max = obtained.max_entry();
    Ok(10.0 * (max * max / diff2).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(dims: &[usize]) -> RealTensor {
        let n: usize = dims.iter().product();
        RealTensor::new(dims.to_vec(), (1..=n).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let x = seq(&[2, 2, 2]);
        assert_eq!(project_omega(&x, &ObservationMask::full(&[2, 2, 2]).unwrap()).unwrap(), x);
        let empty = project_omega(&x, &ObservationMask::empty(&[2, 2, 2]).unwrap()).unwrap();
        assert!(empty.as_slice().iter().all(|&v| v == 0.0));
        let mut first = DenseTensor::filled(&[2, 2, 2], false).unwrap();
        first.as_mut_slice()[0] = true;
        let p = project_omega(&x, &ObservationMask::new(first)).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn projection_rejects_mismatched_mask() {
        let x = seq(&[2, 2, 2]);
        assert!(project_omega(&x, &ObservationMask::full(&[2, 2, 3]).unwrap()).is_err());
    }

    #[test]
    fn sample_mask_counts() {
        assert_eq!(sample_mask(&[4, 3, 2], 1.0, 1).unwrap().known_count(), 24);
        assert_eq!(sample_mask(&[4, 3, 2], 0.0, 1).unwrap().known_count(), 0);
        let a = sample_mask(&[10, 10, 3], 0.1, 7).unwrap();
        let b = sample_mask(&[10, 10, 3], 0.1, 7).unwrap();
        assert_eq!(a.known_count(), 30);
        assert_eq!(a, b);
        assert!((a.sampling_ratio() - 0.1).abs() < 1e-15);
        assert!(sample_mask(&[2, 2], 1.5, 0).is_err());
    }

    #[test]
    fn momentum_sequence() {
        let mut t = 1.0;
        for _ in 0..50 {
            let next = next_t(t);
            assert!(next > t);
            t = next;
        }
        assert!((25.0..=27.0).contains(&t), "t_50 = {t}");
    }

    #[test]
    fn rse_examples() {
        let ones = RealTensor::ones(&[2, 2, 2]).unwrap();
        assert_eq!(rse(&ones, &ones).unwrap(), 0.0);
        assert!((rse(&ones, &ones.scale(2.0)).unwrap() - 1.0).abs() < 1e-12);
        let mut bumped = ones.clone();
        bumped.as_mut_slice()[0] += 0.1;
        assert!((rse(&ones, &bumped).unwrap() - 0.00125).abs() < 1e-12);
        let zeros = RealTensor::zeros(&[2, 2, 2]).unwrap();
        assert!(matches!(rse(&zeros, &ones), Err(Error::UndefinedMetric(_))));
        assert!((rse_with(&ones.scale(2.0), &ones, RseDenominator::Original).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_examples() {
        let mut obtained = RealTensor::zeros(&[1, 1, 2]).unwrap();
        obtained.as_mut_slice()[0] = 1.0;
        let mut original = obtained.clone();
        original.as_mut_slice()[1] = 0.1;
        assert!((psnr(&obtained, &original).unwrap() - 20.0).abs() < 1e-12);
        original.as_mut_slice()[1] = 1.0;
        assert!(psnr(&obtained, &original).unwrap().abs() < 1e-12);
        assert_eq!(psnr(&obtained, &obtained).unwrap(), f64::INFINITY);
    }

    #[test]
    fn zeros_converge_after_one_iteration() {
        let dims = [3, 3, 4];
        let cfg = CompletionConfig::new(TransformSpec::fourier(&dims).unwrap());
        let m = RealTensor::zeros(&dims).unwrap();
        for mask in [sample_mask(&dims, 0.5, 3).unwrap(), ObservationMask::empty(&dims).unwrap()] {
            let (x, trace) = pga_complete(&m, &mask, &cfg, None).unwrap();
            assert!(x.as_slice().iter().all(|&v| v == 0.0));
            assert_eq!(trace.iterations(), 1);
            assert_eq!(trace.status, CompletionStatus::Converged);
        }
    }

    #[test]
    fn empty_mask_with_nonzero_data_returns_zeros() {
        let dims = [2, 3, 3];
        let cfg = CompletionConfig::new(TransformSpec::dct(&dims).unwrap());
        let (x, trace) = pga_complete(&seq(&dims), &ObservationMask::empty(&dims).unwrap(), &cfg, None).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(trace.status, CompletionStatus::Converged);
    }

    #[test]
    fn cproduct_is_rejected() {
        let dims = [2, 2, 2];
        let cfg = CompletionConfig::new(TransformSpec::cproduct(&dims).unwrap());
        let err = pga_complete(&seq(&dims), &ObservationMask::full(&dims).unwrap(), &cfg, None).unwrap_err();
        assert!(matches!(err, Error::UnsupportedSpec { .. }));
    }

    #[test]
    fn full_mask_recovers_data() {
        let dims = [4, 3, 3];
        let mut cfg = CompletionConfig::new(TransformSpec::fourier(&dims).unwrap());
        cfg.mu_bar_ratio = 1e-6;
        // the default tol stops well before μ reaches its floor
        cfg.tol = 1e-12;
        cfg.max_iters = 300;
        let m = seq(&dims);
        let (x, _) = pga_complete(&m, &ObservationMask::full(&dims).unwrap(), &cfg, None).unwrap();
        assert!(rse(&x, &m).unwrap() <= 1e-3);
    }

    #[test]
    fn schedule_and_trace_invariants() {
        let dims = [4, 4, 3];
        let cfg = CompletionConfig::new(TransformSpec::dct(&dims).unwrap());
        let m = seq(&dims);
        let mask = sample_mask(&dims, 0.6, 11).unwrap();
        let (_, trace) = pga_complete_with(&m, &mask, &cfg, Some(&m), |_, _| {}).unwrap();
        let records = &trace.records;
        assert!((trace.mu0 - 0.9 * fro_norm(&project_omega(&m, &mask).unwrap())).abs() < 1e-12);
        let mut t = 1.0;
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.iter, i + 1);
            assert_eq!(r.mu, mu_schedule(trace.mu0, 0.9, trace.mu_bar, i + 1));
            assert!(r.mu >= trace.mu_bar);
            assert_eq!(r.t, t);
            t = next_t(t);
            assert!(r.psnr.is_some());
        }
        for w in records.windows(2) {
            assert!(w[1].mu <= w[0].mu);
        }
        assert!(records.last().unwrap().rse.is_some());
        assert_eq!(trace.to_csv().lines().count(), records.len() + 1);
    }

    #[test]
    fn gradient_step_keeps_observed_entries_exactly() {
        let dims = [3, 2, 2];
        let mask = sample_mask(&dims, 0.5, 5).unwrap();
        let m = seq(&dims).scale(0.37);
        let y = RealTensor::from_fn(&dims, |i| (i[0] as f64).sin() + i[2] as f64 * 1e-3).unwrap();
        let g = gradient_step(&y, &m, &mask).unwrap();
        for i in 0..m.len() {
            let want = if mask.is_observed(i) { m.as_slice()[i] } else { y.as_slice()[i] };
            assert_eq!(g.as_slice()[i].to_bits(), want.to_bits());
        }
    }

    #[test]
    fn reimpose_overwrites_observed_entries() {
        let dims = [3, 3, 2];
        let mut cfg = CompletionConfig::new(TransformSpec::dct(&dims).unwrap());
        cfg.reimpose_observed = true;
        cfg.max_iters = 5;
        let m = seq(&dims);
        let mask = sample_mask(&dims, 0.5, 2).unwrap();
        let (x, _) = pga_complete(&m, &mask, &cfg, None).unwrap();
        for i in 0..m.len() {
            if mask.is_observed(i) {
                assert_eq!(x.as_slice()[i], m.as_slice()[i]);
            }
        }
    }
}
