//! Deterministic synthetic data for tests and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::l_product;
use crate::error::{Error, Result};
use crate::tensor::RealTensor;
use crate::transforms::TransformSpec;

/// Tensor of i.i.d. standard normal entries.
pub fn gaussian(dims: &[usize], rng: &mut impl Rng) -> Result<RealTensor> {
    let n: usize = dims.iter().product();
    RealTensor::new(dims.to_vec(), (0..n).map(|_| rng.sample(StandardNormal)).collect())
}

/// `X ∗_L Y` with Gaussian `X` (`I_1×r×…`) and `Y` (`r×I_2×…`); tubal rank at most `r`.
pub fn low_rank_product(dims: &[usize], rank: usize, spec: &TransformSpec, seed: u64) -> Result<RealTensor> {
    if dims.len() < 3 || rank == 0 {
        return Err(Error::Parameter(format!("low-rank product of dims {dims:?} with rank {rank}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xd = dims.to_vec();
    xd[1] = rank;
    let mut yd = dims.to_vec();
    yd[0] = rank;
    let x = gaussian(&xd, &mut rng)?;
    let y = gaussian(&yd, &mut rng)?;
    l_product(&x, &y, spec)
}

/// `height × width × 3 × frames` clip in `[0, 1]`: drifting smooth gradients
/// plus a static per-pixel texture.
pub fn synthetic_video(height: usize, width: usize, frames: usize, seed: u64) -> Result<RealTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let texture = gaussian(&[height, width, 3], &mut rng)?;
    let phases: Vec<f64> = (0..6).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
    let tau = std::f64::consts::TAU;
    RealTensor::from_fn(&[height, width, 3, frames], |i| {
        let y = i[0] as f64 / height as f64;
        let x = i[1] as f64 / width as f64;
        let c = i[2] as f64;
        let t = i[3] as f64 / frames.max(1) as f64;
        let base = 0.5
            + 0.2 * (tau * (y + 0.25 * t) + phases[0] + 0.7 * c).sin() * (tau * x + phases[1]).cos()
            + 0.12 * (tau * (2.0 * x - 0.5 * t) + phases[2]).sin()
            + 0.08 * (tau * (y + x) + phases[3] + c).cos() * (tau * t + phases[4]).cos();
        let grain = 0.04 * texture[&i[..3]];
        (base + grain).clamp(0.0, 1.0)
    })
}
