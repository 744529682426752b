use serde::{Deserialize, Serialize};

use super::KernelError;
use crate::Real;

/// Adam hyperparameters. Defaults: lr 1e-3, beta1 0.9, beta2 0.999, eps 1e-8.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Real> Default for AdamHyper<T> {
    fn default() -> Self {
        AdamHyper {
            lr: T::from_f64_lossy(1e-3),
            beta1: T::from_f64_lossy(0.9),
            beta2: T::from_f64_lossy(0.999),
            eps: T::from_f64_lossy(1e-8),
        }
    }
}

/// Optimizer state over an ordered list of flat parameter tensors.
///
/// The moment buffers mirror the tensor shapes handed to [`AdamState::new`];
/// every call to [`adam_step`] must pass tensors in that same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState<T> {
    step: u64,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    hyper: AdamHyper<T>,
}

impl<T: Real> AdamState<T> {
    pub fn new(hyper: AdamHyper<T>, tensor_shapes: &[usize]) -> Self {
        AdamState {
            step: 0,
            m: tensor_shapes.iter().map(|&n| vec![T::zero(); n]).collect(),
            v: tensor_shapes.iter().map(|&n| vec![T::zero(); n]).collect(),
            hyper,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn hyper(&self) -> &AdamHyper<T> {
        &self.hyper
    }
}

/// One bias-corrected Adam update applied in place.
///
/// m <- b1*m + (1-b1)*g; v <- b2*v + (1-b2)*g^2;
/// p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
pub fn adam_step<T: Real>(
    state: &mut AdamState<T>,
    params: &mut [&mut [T]],
    grads: &[&[T]],
) -> Result<(), KernelError> {
    if params.len() != state.m.len() || grads.len() != state.m.len() {
        return Err(KernelError::Contract(format!(
            "adam_step expects {} tensors, got {} params / {} grads",
            state.m.len(),
            params.len(),
            grads.len()
        )));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.len() != state.m[i].len() || g.len() != state.m[i].len() {
            return Err(KernelError::Contract(format!(
                "adam_step tensor {i}: state holds {} values, got {} params / {} grads",
                state.m[i].len(),
                p.len(),
                g.len()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::Divergence(format!(
                "non-finite gradient in tensor {i} at step {}",
                state.step + 1
            )));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let h = state.hyper;
    let one = T::one();
    let bc1 = one - h.beta1.powi(t);
    let bc2 = one - h.beta2.powi(t);
    for ((p, g), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        for ((pv, &gv), (mv, vv)) in p.iter_mut().zip(g.iter()).zip(m.iter_mut().zip(v.iter_mut()))
        {
            *mv = h.beta1 * *mv + (one - h.beta1) * gv;
            *vv = h.beta2 * *vv + (one - h.beta2) * gv * gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *pv = *pv - h.lr * m_hat / (v_hat.sqrt() + h.eps);
        }
    }
    Ok(())
}
