//! Versioned checkpoint file for autoencoder detectors.
//!
//! The file is JSON with an explicit format tag and version. It stores the
//! encoder/decoder specs, all parameters, the latent center, and lambda —
//! everything scoring needs. Floats round-trip exactly, so a reloaded
//! checkpoint reproduces scores bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dae::FittedDae;
use super::{CenterParam, DaeConfig, DaeDetector, DaeParams, ModelError};
use crate::numkernel::MlpSpec;
use crate::Real;

const FORMAT: &str = "nadbench-dae-checkpoint";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct CheckpointFile<T> {
    format: String,
    version: u32,
    encoder_spec: MlpSpec,
    decoder_spec: MlpSpec,
    lambda: T,
    center: CenterParam<T>,
    params: DaeParams<T>,
}

impl<T: Real> DaeDetector<T> {
    pub fn save_checkpoint<W: Write>(&self, writer: W) -> Result<(), ModelError> {
        let params = self.params()?.clone();
        let center = self.center()?.clone();
        let file = CheckpointFile {
            format: FORMAT.to_string(),
            version: VERSION,
            encoder_spec: self.config().encoder.clone(),
            decoder_spec: self.config().decoder.clone(),
            lambda: self.config().lambda,
            center,
            params,
        };
        serde_json::to_writer(writer, &file)
            .map_err(|e| ModelError::Checkpoint(format!("write failed: {e}")))
    }

    pub fn save_checkpoint_path(&self, path: &Path) -> Result<(), ModelError> {
        let f = std::fs::File::create(path)
            .map_err(|e| ModelError::Checkpoint(format!("create {}: {e}", path.display())))?;
        self.save_checkpoint(std::io::BufWriter::new(f))
    }

    /// Loads a fitted detector. Training hyperparameters (epochs, batch size,
    /// optimizer) are not stored; the loaded value carries defaults and is
    /// meant for scoring.
    pub fn load_checkpoint<R: Read>(reader: R) -> Result<Self, ModelError> {
        let file: CheckpointFile<T> = serde_json::from_reader(reader)
            .map_err(|e| ModelError::Checkpoint(format!("parse failed: {e}")))?;
        if file.format != FORMAT {
            return Err(ModelError::Checkpoint(format!(
                "unexpected format tag {:?}",
                file.format
            )));
        }
        if file.version != VERSION {
            return Err(ModelError::Checkpoint(format!(
                "unsupported version {} (supported: {VERSION})",
                file.version
            )));
        }
        let defaults = DaeConfig::<T>::for_input_dim(file.encoder_spec.input_dim());
        let config = DaeConfig::new(
            file.encoder_spec,
            file.decoder_spec,
            file.lambda,
            file.center.mode,
            defaults.epochs,
            defaults.batch_size,
            defaults.adam,
        )?;
        if !file.params.encoder.matches_spec(&config.encoder)
            || !file.params.decoder.matches_spec(&config.decoder)
        {
            return Err(ModelError::Checkpoint(
                "stored parameters do not match stored specs".into(),
            ));
        }
        if !file.params.encoder.is_finite()
            || !file.params.decoder.is_finite()
            || file.center.c.iter().any(|v| !v.is_finite())
        {
            return Err(ModelError::Checkpoint(
                "stored parameters contain non-finite values".into(),
            ));
        }
        if file.center.c.len() != config.latent_dim() {
            return Err(ModelError::Checkpoint(format!(
                "center width {} != latent dim {}",
                file.center.c.len(),
                config.latent_dim()
            )));
        }
        Ok(DaeDetector::from_parts(
            config,
            FittedDae {
                params: file.params,
                center: file.center,
            },
        ))
    }

    pub fn load_checkpoint_path(path: &Path) -> Result<Self, ModelError> {
        let f = std::fs::File::open(path)
            .map_err(|e| ModelError::Checkpoint(format!("open {}: {e}", path.display())))?;
        Self::load_checkpoint(std::io::BufReader::new(f))
    }
}
