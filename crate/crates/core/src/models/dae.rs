use serde::{Deserialize, Serialize};

use super::{Detector, ModelError};
use crate::numkernel::{
    adam_step, init_mlp_params, mlp_backward, mlp_forward, AdamHyper, AdamState, HiddenActivation,
    Matrix, MlpGrads, MlpParams, MlpSpec, OutputActivation, SeededRng,
};
use crate::Real;

/// How the latent center `c` is maintained during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterMode {
    /// `c` frozen at the origin.
    FixedZero,
    /// `c` recomputed as the training-set latent mean at the end of every
    /// epoch; no gradient flows into it.
    Mean,
    /// `c` is a trainable parameter updated by the optimizer alongside the
    /// network weights.
    Learnable,
}

/// The latent center and the policy that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterParam<T> {
    pub c: Vec<T>,
    pub mode: CenterMode,
}

/// Autoencoder configuration.
///
/// The encoder and decoder are mirrored MLPs: the encoder maps input to the
/// latent dimension, the decoder maps latent back to input. `lambda` weighs
/// the latent term; with `lambda == 0` the model is a plain reconstruction
/// autoencoder, and the center mode has no effect on the objective (a
/// learnable center then simply receives zero gradient).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaeConfig<T> {
    pub encoder: MlpSpec,
    pub decoder: MlpSpec,
    pub lambda: T,
    pub center_mode: CenterMode,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamHyper<T>,
}

impl<T: Real> DaeConfig<T> {
    pub fn new(
        encoder: MlpSpec,
        decoder: MlpSpec,
        lambda: T,
        center_mode: CenterMode,
        epochs: usize,
        batch_size: usize,
        adam: AdamHyper<T>,
    ) -> Result<Self, ModelError> {
        if encoder.output_dim() != decoder.input_dim() {
            return Err(ModelError::Config(format!(
                "latent width mismatch: encoder emits {}, decoder expects {}",
                encoder.output_dim(),
                decoder.input_dim()
            )));
        }
        if decoder.output_dim() != encoder.input_dim() {
            return Err(ModelError::Config(format!(
                "reconstruction width mismatch: decoder emits {}, encoder expects {}",
                decoder.output_dim(),
                encoder.input_dim()
            )));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(ModelError::Config(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if epochs == 0 || batch_size == 0 {
            return Err(ModelError::Config(
                "epochs and batch_size must be >= 1".into(),
            ));
        }
        Ok(DaeConfig {
            encoder,
            decoder,
            lambda,
            center_mode,
            epochs,
            batch_size,
            adam,
        })
    }

    /// Default architecture for a `d`-dimensional input: encoder
    /// `[d, 64, 32, L]` with `L = max(2, ceil(d / 12))`, decoder mirrored,
    /// relu hidden layers, linear outputs.
    pub fn for_input_dim(d: usize) -> Self {
        let latent = (d + 11) / 12;
        Self::with_shape(d, &[64, 32], latent.max(2))
    }

    /// Symmetric architecture with explicit hidden widths and latent size.
    pub fn with_shape(d: usize, hidden: &[usize], latent: usize) -> Self {
        let mut enc_sizes = vec![d];
        enc_sizes.extend_from_slice(hidden);
        enc_sizes.push(latent);
        let mut dec_sizes: Vec<usize> = enc_sizes.clone();
        dec_sizes.reverse();
        let encoder = MlpSpec::new(enc_sizes, HiddenActivation::Relu, OutputActivation::Linear)
            .expect("sizes are non-empty and positive");
        let decoder = MlpSpec::new(dec_sizes, HiddenActivation::Relu, OutputActivation::Linear)
            .expect("sizes are non-empty and positive");
        DaeConfig {
            encoder,
            decoder,
            lambda: T::one(),
            center_mode: CenterMode::Learnable,
            epochs: 50,
            batch_size: 128,
            adam: AdamHyper::default(),
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.input_dim()
    }
}

/// Per-sample (or batch-mean) loss decomposition:
/// `total = recon + lambda * latent` exactly as computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown<T> {
    pub recon: T,
    pub latent: T,
    pub total: T,
}

/// Squared-error loss of one sample: `|x - x_hat|^2 + lambda * |z - c|^2`.
pub fn dae_loss<T: Real>(
    x: &[T],
    x_hat: &[T],
    z: &[T],
    c: &[T],
    lambda: T,
) -> Result<LossBreakdown<T>, ModelError> {
    if x.len() != x_hat.len() {
        return Err(ModelError::Contract(format!(
            "input width {} != reconstruction width {}",
            x.len(),
            x_hat.len()
        )));
    }
    if z.len() != c.len() {
        return Err(ModelError::Contract(format!(
            "latent width {} != center width {}",
            z.len(),
            c.len()
        )));
    }
    let recon = sq_norm_diff(x, x_hat);
    let latent = sq_norm_diff(z, c);
    Ok(LossBreakdown {
        recon,
        latent,
        total: recon + lambda * latent,
    })
}

/// Mean loss over a batch; rows of `x`/`x_hat` and `z` pair up by index.
pub fn dae_batch_loss<T: Real>(
    x: &Matrix<T>,
    x_hat: &Matrix<T>,
    z: &Matrix<T>,
    c: &[T],
    lambda: T,
) -> Result<LossBreakdown<T>, ModelError> {
    if x.rows() != x_hat.rows() || x.rows() != z.rows() || x.rows() == 0 {
        return Err(ModelError::Contract(
            "batch loss needs equal, nonzero row counts".into(),
        ));
    }
    let mut recon = T::zero();
    let mut latent = T::zero();
    for i in 0..x.rows() {
        let each = dae_loss(x.row(i), x_hat.row(i), z.row(i), c, lambda)?;
        recon += each.recon;
        latent += each.latent;
    }
    let n = T::from_f64_lossy(x.rows() as f64);
    let recon = recon / n;
    let latent = latent / n;
    Ok(LossBreakdown {
        recon,
        latent,
        total: recon + lambda * latent,
    })
}

fn sq_norm_diff<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Encoder and decoder parameters of one autoencoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaeParams<T> {
    pub encoder: MlpParams<T>,
    pub decoder: MlpParams<T>,
}

/// Gradients of the batch-mean objective with respect to all parameters.
#[derive(Debug, Clone)]
pub struct DaeGrads<T> {
    pub encoder: MlpGrads<T>,
    pub decoder: MlpGrads<T>,
    /// dLoss/dc = 2 * lambda * (c - mean of batch latent codes).
    pub center: Vec<T>,
}

/// Batch-mean loss and its exact gradients for the given parameters.
///
/// The center gradient is always computed; callers that keep the center
/// frozen or recompute it analytically simply ignore it.
pub fn dae_loss_grads<T: Real>(
    params: &DaeParams<T>,
    encoder_spec: &MlpSpec,
    decoder_spec: &MlpSpec,
    center: &[T],
    lambda: T,
    batch: &Matrix<T>,
) -> Result<(LossBreakdown<T>, DaeGrads<T>), ModelError> {
    let enc_cache = mlp_forward(&params.encoder, encoder_spec, batch)?;
    let z = enc_cache.output();
    let dec_cache = mlp_forward(&params.decoder, decoder_spec, z)?;
    let x_hat = dec_cache.output();
    let loss = dae_batch_loss(batch, x_hat, z, center, lambda)?;

    let n = T::from_f64_lossy(batch.rows() as f64);
    let two = T::from_f64_lossy(2.0);

    // dLoss/dx_hat = 2 (x_hat - x) / n
    let mut d_xhat = x_hat.clone();
    for (g, &x) in d_xhat.as_mut_slice().iter_mut().zip(batch.as_slice()) {
        *g = two * (*g - x) / n;
    }
    let (dec_grads, dz_from_recon) = mlp_backward(&params.decoder, decoder_spec, &dec_cache, &d_xhat)?;

    // dLoss/dz = decoder pullback + 2 lambda (z - c) / n
    let mut dz = dz_from_recon;
    let latent_dim = center.len();
    for r in 0..z.rows() {
        let z_row = z.row(r);
        let g_row = dz.row_mut(r);
        for j in 0..latent_dim {
            g_row[j] += two * lambda * (z_row[j] - center[j]) / n;
        }
    }
    let (enc_grads, _d_input) = mlp_backward(&params.encoder, encoder_spec, &enc_cache, &dz)?;

    // dLoss/dc = 2 lambda (c - z_bar)
    let z_bar = z.column_means().map_err(ModelError::Kernel)?;
    let center_grad: Vec<T> = center
        .iter()
        .zip(&z_bar)
        .map(|(&cj, &zj)| two * lambda * (cj - zj))
        .collect();

    Ok((
        loss,
        DaeGrads {
            encoder: enc_grads,
            decoder: dec_grads,
            center: center_grad,
        },
    ))
}

/// Incremental trainer over one parameter set; used by both the plain fit
/// and the DUAD retraining loop.
pub(crate) struct DaeTrainer<T> {
    cfg: DaeConfig<T>,
    params: DaeParams<T>,
    center: Vec<T>,
    adam: AdamState<T>,
    shuffle_rng: SeededRng,
    epochs_done: usize,
}

impl<T: Real> DaeTrainer<T> {
    /// Initializes parameters and the center from `rng` child streams and the
    /// initial training data. The center starts at the latent mean of `train`
    /// under the freshly initialized encoder (or at zero when frozen).
    pub(crate) fn new(
        cfg: &DaeConfig<T>,
        train: &Matrix<T>,
        rng: &SeededRng,
    ) -> Result<Self, ModelError> {
        if train.rows() == 0 {
            return Err(ModelError::Contract("training set is empty".into()));
        }
        if train.cols() != cfg.input_dim() {
            return Err(ModelError::Contract(format!(
                "training width {} != encoder input {}",
                train.cols(),
                cfg.input_dim()
            )));
        }
        let mut enc_rng = rng.stream("init/encoder");
        let mut dec_rng = rng.stream("init/decoder");
        let params = DaeParams {
            encoder: init_mlp_params(&cfg.encoder, &mut enc_rng),
            decoder: init_mlp_params(&cfg.decoder, &mut dec_rng),
        };
        let center = match cfg.center_mode {
            CenterMode::FixedZero => vec![T::zero(); cfg.latent_dim()],
            CenterMode::Mean | CenterMode::Learnable => latent_mean(&params, cfg, train)?,
        };
        let mut shapes = params.encoder.tensor_shapes();
        shapes.extend(params.decoder.tensor_shapes());
        if cfg.center_mode == CenterMode::Learnable {
            shapes.push(cfg.latent_dim());
        }
        let adam = AdamState::new(cfg.adam, &shapes);
        Ok(DaeTrainer {
            cfg: cfg.clone(),
            params,
            center,
            adam,
            shuffle_rng: rng.stream("shuffle"),
            epochs_done: 0,
        })
    }

    /// Runs `epochs` of minibatch training on `data`, continuing from the
    /// current parameters.
    pub(crate) fn train_epochs(
        &mut self,
        data: &Matrix<T>,
        epochs: usize,
    ) -> Result<(), ModelError> {
        if data.rows() == 0 {
            return Err(ModelError::Contract("training set is empty".into()));
        }
        let mut order: Vec<usize> = (0..data.rows()).collect();
        for _ in 0..epochs {
            self.shuffle_rng.shuffle(&mut order);
            for chunk in order.chunks(self.cfg.batch_size) {
                let batch = data.select_rows(chunk);
                let (loss, grads) = dae_loss_grads(
                    &self.params,
                    &self.cfg.encoder,
                    &self.cfg.decoder,
                    &self.center,
                    self.cfg.lambda,
                    &batch,
                )?;
                if !loss.total.is_finite() {
                    return Err(ModelError::Divergence {
                        epoch: self.epochs_done,
                        message: format!("batch loss became {}", loss.total),
                    });
                }
                let step = self.apply_step(&grads);
                step.map_err(|e| match e {
                    crate::numkernel::KernelError::Divergence(msg) => ModelError::Divergence {
                        epoch: self.epochs_done,
                        message: msg,
                    },
                    other => ModelError::Kernel(other),
                })?;
            }
            if self.cfg.center_mode == CenterMode::Mean {
                self.center = latent_mean(&self.params, &self.cfg, data)?;
            }
            self.epochs_done += 1;
        }
        Ok(())
    }

    fn apply_step(&mut self, grads: &DaeGrads<T>) -> Result<(), crate::numkernel::KernelError> {
        let learnable = self.cfg.center_mode == CenterMode::Learnable;
        let mut param_tensors = self.params.encoder.tensors_mut();
        param_tensors.extend(self.params.decoder.tensors_mut());
        if learnable {
            param_tensors.push(self.center.as_mut_slice());
        }
        let mut grad_tensors = grads.encoder.tensors();
        grad_tensors.extend(grads.decoder.tensors());
        if learnable {
            grad_tensors.push(grads.center.as_slice());
        }
        adam_step(&mut self.adam, &mut param_tensors, &grad_tensors)
    }

    pub(crate) fn encode(&self, data: &Matrix<T>) -> Result<Matrix<T>, ModelError> {
        let cache = mlp_forward(&self.params.encoder, &self.cfg.encoder, data)?;
        Ok(cache.output().clone())
    }

    pub(crate) fn into_detector(self) -> DaeDetector<T> {
        DaeDetector {
            config: self.cfg.clone(),
            state: Some(FittedDae {
                params: self.params,
                center: CenterParam {
                    c: self.center,
                    mode: self.cfg.center_mode,
                },
            }),
        }
    }

    pub(crate) fn scores(&self, batch: &Matrix<T>) -> Result<Vec<T>, ModelError> {
        score_with(
            &self.params,
            &self.cfg.encoder,
            &self.cfg.decoder,
            &self.center,
            self.cfg.lambda,
            batch,
        )
    }
}

/// Latent mean of `data` under the given encoder parameters.
fn latent_mean<T: Real>(
    params: &DaeParams<T>,
    cfg: &DaeConfig<T>,
    data: &Matrix<T>,
) -> Result<Vec<T>, ModelError> {
    let cache = mlp_forward(&params.encoder, &cfg.encoder, data)?;
    cache.output().column_means().map_err(ModelError::Kernel)
}

fn score_with<T: Real>(
    params: &DaeParams<T>,
    encoder_spec: &MlpSpec,
    decoder_spec: &MlpSpec,
    center: &[T],
    lambda: T,
    batch: &Matrix<T>,
) -> Result<Vec<T>, ModelError> {
    let enc_cache = mlp_forward(&params.encoder, encoder_spec, batch)?;
    let z = enc_cache.output();
    let dec_cache = mlp_forward(&params.decoder, decoder_spec, z)?;
    let x_hat = dec_cache.output();
    let mut out = Vec::with_capacity(batch.rows());
    for i in 0..batch.rows() {
        let each = dae_loss(batch.row(i), x_hat.row(i), z.row(i), center, lambda)?;
        if !each.total.is_finite() {
            return Err(ModelError::Kernel(
                crate::numkernel::KernelError::NonFinite("dae score".into()),
            ));
        }
        out.push(each.total);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct FittedDae<T> {
    pub(crate) params: DaeParams<T>,
    pub(crate) center: CenterParam<T>,
}

/// Autoencoder detector. `lambda == 0` makes it a standard DAE; `lambda > 0`
/// a latent-regulated one (DAE-LR). The anomaly score of a sample is the
/// full objective value `|x - x_hat|^2 + lambda * |z - c|^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaeDetector<T> {
    config: DaeConfig<T>,
    state: Option<FittedDae<T>>,
}

impl<T: Real> DaeDetector<T> {
    pub fn new(config: DaeConfig<T>) -> Self {
        DaeDetector {
            config,
            state: None,
        }
    }

    pub fn config(&self) -> &DaeConfig<T> {
        &self.config
    }

    pub fn is_fitted(&self) -> bool {
        self.state.is_some()
    }

    pub fn params(&self) -> Result<&DaeParams<T>, ModelError> {
        self.state
            .as_ref()
            .map(|s| &s.params)
            .ok_or(ModelError::NotFitted)
    }

    pub fn center(&self) -> Result<&CenterParam<T>, ModelError> {
        self.state
            .as_ref()
            .map(|s| &s.center)
            .ok_or(ModelError::NotFitted)
    }

    /// Latent codes of a batch; available once fitted.
    pub fn encode(&self, batch: &Matrix<T>) -> Result<Matrix<T>, ModelError> {
        let state = self.state.as_ref().ok_or(ModelError::NotFitted)?;
        let cache = mlp_forward(&state.params.encoder, &self.config.encoder, batch)?;
        Ok(cache.output().clone())
    }

    /// Mean loss decomposition over a batch, for monitoring. The latent term
    /// can collapse jointly with the codes when `lambda` dominates; watching
    /// `recon` against `latent` is how to catch that.
    pub fn batch_loss(&self, batch: &Matrix<T>) -> Result<LossBreakdown<T>, ModelError> {
        let state = self.state.as_ref().ok_or(ModelError::NotFitted)?;
        let enc_cache = mlp_forward(&state.params.encoder, &self.config.encoder, batch)?;
        let z = enc_cache.output();
        let dec_cache = mlp_forward(&state.params.decoder, &self.config.decoder, z)?;
        dae_batch_loss(batch, dec_cache.output(), z, &state.center.c, self.config.lambda)
    }

    pub(crate) fn from_parts(config: DaeConfig<T>, state: FittedDae<T>) -> Self {
        DaeDetector {
            config,
            state: Some(state),
        }
    }
}

impl<T: Real> Detector<T> for DaeDetector<T> {
    fn fit(&mut self, train: &Matrix<T>, rng: &mut SeededRng) -> Result<(), ModelError> {
        let mut trainer = DaeTrainer::new(&self.config, train, rng)?;
        trainer.train_epochs(train, self.config.epochs)?;
        *self = trainer.into_detector();
        Ok(())
    }

    fn score(&self, batch: &Matrix<T>) -> Result<Vec<T>, ModelError> {
        let state = self.state.as_ref().ok_or(ModelError::NotFitted)?;
        score_with(
            &state.params,
            &self.config.encoder,
            &self.config.decoder,
            &state.center.c,
            self.config.lambda,
            batch,
        )
    }
}

/// Fit a fresh autoencoder detector on `train`.
pub fn fit_dae<T: Real>(
    config: &DaeConfig<T>,
    train: &Matrix<T>,
    rng: &mut SeededRng,
) -> Result<DaeDetector<T>, ModelError> {
    let mut det = DaeDetector::new(config.clone());
    det.fit(train, rng)?;
    Ok(det)
}
