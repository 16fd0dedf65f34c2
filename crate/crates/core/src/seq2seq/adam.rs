//! Bias-corrected Adam.

use serde::{Deserialize, Serialize};

use super::{ModelSnapshot, Params};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Global gradient-norm clip applied by the trainers before each update.
    pub clip_norm: Option<f64>,
    /// The rate ramps linearly from lr / warmup_steps to lr over this many
    /// updates of a fresh optimizer. Zero disables the ramp.
    pub warmup_steps: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            lr: 1e-2,
            beta1: 0.9,
            beta2: 0.98,
            eps: 1e-8,
            clip_norm: Some(5.0),
            warmup_steps: 100,
        }
    }
}

impl OptConfig {
    /// The large-model learning rate; the toy default is larger.
    pub const LARGE_MODEL_LR: f64 = 1e-4;
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptState {
    pub config: OptConfig,
    pub m: Params,
    pub v: Params,
    pub step: u64,
}

impl OptState {
    pub fn new(config: OptConfig, model: &ModelSnapshot) -> Self {
        OptState {
            config,
            m: Params::zeros(&model.dims),
            v: Params::zeros(&model.dims),
            step: 0,
        }
    }

    /// Learning-rate multiplier of the update numbered `self.step`.
    fn warmup_factor(&self) -> f64 {
        let w = self.config.warmup_steps;
        if w == 0 {
            1.0
        } else {
            (self.step as f64 / w as f64).min(1.0)
        }
    }

    /// One update of `model` from `grads`; increments both step counters.
    pub fn step(&mut self, model: &mut ModelSnapshot, grads: &Params) -> Result<()> {
        model.params.check_shapes(grads)?;
        self.m.check_shapes(grads)?;
        if let Some(name) = grads.first_non_finite() {
            return Err(Error::Numeric {
                param: name.to_string(),
            });
        }
        self.step += 1;
        let c = self.config;
        let t = self.step as i32;
        let bc1 = 1.0 - c.beta1.powi(t);
        let bc2 = 1.0 - c.beta2.powi(t);
        let lr = c.lr * self.warmup_factor();
        let params = model.params.tensors_mut();
        let ms = self.m.tensors_mut();
        let vs = self.v.tensors_mut();
        for (((p, m), v), g) in params.into_iter().zip(ms).zip(vs).zip(grads.tensors()) {
            for i in 0..p.data.len() {
                let gi = g.data[i];
                m.data[i] = c.beta1 * m.data[i] + (1.0 - c.beta1) * gi;
                v.data[i] = c.beta2 * v.data[i] + (1.0 - c.beta2) * gi * gi;
                let m_hat = m.data[i] / bc1;
                let v_hat = v.data[i] / bc2;
                p.data[i] -= lr * m_hat / (v_hat.sqrt() + c.eps);
            }
        }
        model.step += 1;
        Ok(())
    }
}

/// Rescales `grads` so its global L2 norm is at most `max`; returns the
/// norm before clipping.
pub fn clip_norm(grads: &mut Params, max: f64) -> f64 {
    let n = grads.norm();
    if n > max {
        grads.scale(max / n);
    }
    n
}
