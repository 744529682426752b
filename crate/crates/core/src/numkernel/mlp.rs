use serde::{Deserialize, Serialize};

use super::{KernelError, Matrix, SeededRng};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenActivation {
    Relu,
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    Linear,
    Sigmoid,
}

/// Shape and activation choices of a dense feed-forward network.
///
/// `layer_sizes` runs input -> hidden... -> output; the hidden activation is
/// applied to every layer except the last, which uses the output activation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    layer_sizes: Vec<usize>,
    hidden: HiddenActivation,
    output: OutputActivation,
}

impl MlpSpec {
    pub fn new(
        layer_sizes: Vec<usize>,
        hidden: HiddenActivation,
        output: OutputActivation,
    ) -> Result<Self, KernelError> {
        if layer_sizes.len() < 2 {
            return Err(KernelError::Domain(format!(
                "an MLP needs at least 2 layers, got {}",
                layer_sizes.len()
            )));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(KernelError::Domain("layer sizes must be >= 1".into()));
        }
        Ok(MlpSpec {
            layer_sizes,
            hidden,
            output,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn weight_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    fn activation_at(&self, layer: usize) -> Activation {
        if layer + 1 == self.weight_layers() {
            match self.output {
                OutputActivation::Linear => Activation::Linear,
                OutputActivation::Sigmoid => Activation::Sigmoid,
            }
        } else {
            match self.hidden {
                HiddenActivation::Relu => Activation::Relu,
                HiddenActivation::Tanh => Activation::Tanh,
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Linear,
}

impl Activation {
    fn apply<T: Real>(self, pre: T) -> T {
        match self {
            Activation::Relu => {
                if pre > T::zero() {
                    pre
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => pre.tanh(),
            Activation::Sigmoid => T::one() / (T::one() + (-pre).exp()),
            Activation::Linear => pre,
        }
    }

    /// Derivative in terms of (pre-activation, activation).
    fn derivative<T: Real>(self, pre: T, post: T) -> T {
        match self {
            Activation::Relu => {
                if pre > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => T::one() - post * post,
            Activation::Sigmoid => post * (T::one() - post),
            Activation::Linear => T::one(),
        }
    }
}

/// One dense layer: weight of shape (fan_in, fan_out) plus a bias row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams<T> {
    pub weight: Matrix<T>,
    pub bias: Vec<T>,
}

/// All trainable parameters of an MLP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams<T> {
    pub layers: Vec<LayerParams<T>>,
}

impl<T: Real> MlpParams<T> {
    pub fn zeros(spec: &MlpSpec) -> Self {
        let layers = spec
            .layer_sizes
            .windows(2)
            .map(|w| LayerParams {
                weight: Matrix::zeros(w[0], w[1]),
                bias: vec![T::zero(); w[1]],
            })
            .collect();
        MlpParams { layers }
    }

    pub fn matches_spec(&self, spec: &MlpSpec) -> bool {
        self.layers.len() == spec.weight_layers()
            && self
                .layers
                .iter()
                .zip(spec.layer_sizes.windows(2))
                .all(|(l, w)| {
                    l.weight.rows() == w[0] && l.weight.cols() == w[1] && l.bias.len() == w[1]
                })
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weight.is_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    /// Flattened parameter tensors in a fixed order (per layer: weight, bias).
    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for layer in &mut self.layers {
            out.push(layer.weight.as_mut_slice());
            out.push(layer.bias.as_mut_slice());
        }
        out
    }

    pub fn tensor_shapes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for layer in &self.layers {
            out.push(layer.weight.as_slice().len());
            out.push(layer.bias.len());
        }
        out
    }
}

/// Parameter gradients; mirrors the shapes of [`MlpParams`].
pub type MlpGrads<T> = MlpParams<T>;

impl<T: Real> MlpGrads<T> {
    pub fn tensors(&self) -> Vec<&[T]> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for layer in &self.layers {
            out.push(layer.weight.as_slice());
            out.push(layer.bias.as_slice());
        }
        out
    }
}

/// Glorot-uniform initialization: weights in +-sqrt(6 / (fan_in + fan_out)),
/// biases zero. Draw order is fixed (layer by layer, row-major).
pub fn init_mlp_params<T: Real>(spec: &MlpSpec, rng: &mut SeededRng) -> MlpParams<T> {
    let layers = spec
        .layer_sizes
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let data: Vec<T> = (0..fan_in * fan_out)
                .map(|_| rng.uniform(T::from_f64_lossy(-bound), T::from_f64_lossy(bound)))
                .collect();
            LayerParams {
                weight: Matrix::from_vec(fan_in, fan_out, data).expect("sized by construction"),
                bias: vec![T::zero(); fan_out],
            }
        })
        .collect();
    MlpParams { layers }
}

/// Per-layer values cached by [`mlp_forward`], sufficient for exact backprop.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    /// Activations per layer; `post[0]` is the input batch, `post.last()` the output.
    pub post: Vec<Matrix<T>>,
    /// Pre-activations per weight layer (`pre[l]` feeds `post[l + 1]`).
    pub pre: Vec<Matrix<T>>,
}

impl<T: Real> ForwardCache<T> {
    pub fn output(&self) -> &Matrix<T> {
        self.post.last().expect("cache holds at least the input")
    }

    pub fn batch_rows(&self) -> usize {
        self.post[0].rows()
    }

    fn matches(&self, spec: &MlpSpec, params: &MlpParams<T>) -> bool {
        if self.pre.len() != spec.weight_layers() || self.post.len() != spec.layer_sizes.len() {
            return false;
        }
        let rows = self.batch_rows();
        self.post
            .iter()
            .zip(&spec.layer_sizes)
            .all(|(m, &s)| m.rows() == rows && m.cols() == s)
            && self
                .pre
                .iter()
                .zip(spec.layer_sizes.iter().skip(1))
                .all(|(m, &s)| m.rows() == rows && m.cols() == s)
            && params.matches_spec(spec)
    }
}

/// Run a batch through the network, returning the cache whose last activation
/// is the output. Rows are independent: the result for any row does not
/// depend on which other rows share the batch.
pub fn mlp_forward<T: Real>(
    params: &MlpParams<T>,
    spec: &MlpSpec,
    batch: &Matrix<T>,
) -> Result<ForwardCache<T>, KernelError> {
    if !params.matches_spec(spec) {
        return Err(KernelError::Contract(
            "parameters do not match the MLP spec".into(),
        ));
    }
    if batch.cols() != spec.input_dim() {
        return Err(KernelError::dimension(
            "mlp_forward batch width",
            spec.input_dim().to_string(),
            batch.cols().to_string(),
        ));
    }
    let mut post = Vec::with_capacity(spec.layer_sizes.len());
    let mut pre = Vec::with_capacity(spec.weight_layers());
    post.push(batch.clone());
    for (l, layer) in params.layers.iter().enumerate() {
        let mut z = post[l].matmul(&layer.weight)?;
        z.add_row_broadcast(&layer.bias)?;
        let act = spec.activation_at(l);
        let a = z.map(|v| act.apply(v));
        pre.push(z);
        post.push(a);
    }
    let cache = ForwardCache { post, pre };
    cache.output().check_finite("mlp_forward output")?;
    Ok(cache)
}

/// Exact reverse-mode gradients for the cached forward pass.
///
/// `output_grad` is dLoss/dOutput, including any batch-mean factors; the
/// returned parameter gradients are the exact chain-rule sums over the batch,
/// and the second value is dLoss/dInput.
pub fn mlp_backward<T: Real>(
    params: &MlpParams<T>,
    spec: &MlpSpec,
    cache: &ForwardCache<T>,
    output_grad: &Matrix<T>,
) -> Result<(MlpGrads<T>, Matrix<T>), KernelError> {
    if !cache.matches(spec, params) {
        return Err(KernelError::Contract(
            "forward cache does not match this spec/params pair".into(),
        ));
    }
    if output_grad.rows() != cache.batch_rows() || output_grad.cols() != spec.output_dim() {
        return Err(KernelError::Contract(format!(
            "output_grad shape {}x{} does not match cached output {}x{}",
            output_grad.rows(),
            output_grad.cols(),
            cache.batch_rows(),
            spec.output_dim()
        )));
    }

    let n_layers = spec.weight_layers();
    let mut grads = MlpGrads::zeros(spec);
    // delta = dLoss/dPre for the layer currently being processed.
    let mut delta = activation_backward(
        output_grad,
        &cache.pre[n_layers - 1],
        &cache.post[n_layers],
        spec.activation_at(n_layers - 1),
    );
    for l in (0..n_layers).rev() {
        grads.layers[l].weight = cache.post[l].matmul_tn(&delta)?;
        grads.layers[l].bias = delta.column_sums();
        let upstream = delta.matmul_nt(&params.layers[l].weight)?;
        if l == 0 {
            return Ok((grads, upstream));
        }
        delta = activation_backward(
            &upstream,
            &cache.pre[l - 1],
            &cache.post[l],
            spec.activation_at(l - 1),
        );
    }
    unreachable!("loop returns at l == 0")
}

/// grad ⊙ act'(pre), with act' evaluated from the cached (pre, post) pair.
fn activation_backward<T: Real>(
    grad: &Matrix<T>,
    pre: &Matrix<T>,
    post: &Matrix<T>,
    act: Activation,
) -> Matrix<T> {
    let mut out = grad.clone();
    for ((o, &p), &a) in out
        .as_mut_slice()
        .iter_mut()
        .zip(pre.as_slice())
        .zip(post.as_slice())
    {
        *o = *o * act.derivative(p, a);
    }
    out
}
