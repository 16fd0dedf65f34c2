//! Central-difference verification of the analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{forward_loss, loss_only};
use super::{ModelSnapshot, Params};
use crate::corpus::{Ids, Lang};
use crate::error::Result;

pub const MIN_COORDS: usize = 50;

/// Relative error with a small absolute floor so coordinates whose true
/// gradient is ~0 compare on an absolute scale.
fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / (a.abs() + n.abs()).max(1e-6)
}

/// Maximum relative error between analytic and central-difference gradients
/// over `MIN_COORDS` coordinates sampled across every tensor.
pub fn grad_check(model: &ModelSnapshot, src: &[Ids], tgt: &[Ids], target: Lang, h: f64, seed: u64) -> Result<f64> {
    let analytic = forward_loss(model, src, tgt, target)?.grads;
    grad_check_with(model, &analytic, src, tgt, target, h, seed)
}

/// As [`grad_check`], against caller-supplied gradients.
#[allow(clippy::too_many_arguments)]
pub fn grad_check_with(
    model: &ModelSnapshot,
    analytic: &Params,
    src: &[Ids],
    tgt: &[Ids],
    target: Lang,
    h: f64,
    seed: u64,
) -> Result<f64> {
    assert!((1e-6..=1e-3).contains(&h), "step {h} outside [1e-6, 1e-3]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = model.clone();
    let n_tensors = analytic.tensors().len();
    let mut worst: f64 = 0.0;
    for k in 0..MIN_COORDS.max(2 * n_tensors) {
        let ti = k % n_tensors;
        let len = probe.params.tensors()[ti].data.len();
        let i = rng.gen_range(0..len);
        let orig = probe.params.tensors()[ti].data[i];
        probe.params.tensors_mut()[ti].data[i] = orig + h;
        let up = loss_only(&probe, src, tgt, target)?;
        probe.params.tensors_mut()[ti].data[i] = orig - h;
        let down = loss_only(&probe, src, tgt, target)?;
        probe.params.tensors_mut()[ti].data[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        worst = worst.max(rel_err(analytic.tensors()[ti].data[i], numeric));
    }
    Ok(worst)
}
