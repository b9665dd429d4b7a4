//! Propeller (micro-Doppler) channel: a weighted sum of cyclic gain
//! processes multiplying the transmitted buffer, plus complex AWGN.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::signal::{SampleBuffer, SampleClock};
use crate::spectral::{forward_fft, Spectrum};

/// One period of a cyclic modulator, parameterised by phase fraction in [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PropellerShape {
    /// `lo` for the first `duty` fraction of each cycle, `hi` for the rest.
    SquareWave { duty: f64, lo: f64, hi: f64 },
    /// `1 + beta·cos(θ)`.
    SineRipple { beta: f64 },
    /// Gain samples spanning exactly one cycle, held piecewise constant.
    CustomCycle { gains: Vec<f64> },
}

impl Default for PropellerShape {
    fn default() -> Self {
        PropellerShape::SquareWave {
            duty: 0.3,
            lo: 0.5,
            hi: 1.0,
        }
    }
}

impl PropellerShape {
    fn validate(&self) -> Result<()> {
        match *self {
            PropellerShape::SquareWave { duty, lo, hi } => {
                ensure(duty > 0.0 && duty < 1.0, || {
                    format!("square-wave duty must lie in (0, 1), got {duty}")
                })?;
                ensure(lo > 0.0 && lo <= hi && hi.is_finite(), || {
                    format!("square-wave levels need 0 < lo <= hi, got lo={lo} hi={hi}")
                })
            }
            PropellerShape::SineRipple { beta } => ensure((0.0..1.0).contains(&beta), || {
                format!("sine ripple beta must lie in [0, 1), got {beta}")
            }),
            PropellerShape::CustomCycle { ref gains } => {
                ensure(!gains.is_empty(), || {
                    "custom cycle needs at least one gain".into()
                })?;
                ensure(gains.iter().all(|g| g.is_finite()), || {
                    "custom cycle gains must be finite".into()
                })
            }
        }
    }

    /// Gain at cycle fraction `frac` ∈ [0, 1).
    pub fn gain(&self, frac: f64) -> f64 {
        match *self {
            PropellerShape::SquareWave { duty, lo, hi } => {
                if frac < duty {
                    lo
                } else {
                    hi
                }
            }
            PropellerShape::SineRipple { beta } => {
                1.0 + beta * (std::f64::consts::TAU * frac).cos()
            }
            PropellerShape::CustomCycle { ref gains } => {
                let idx = ((frac * gains.len() as f64) as usize).min(gains.len() - 1);
                gains[idx]
            }
        }
    }
}

/// A single cyclic modulator g(2π f_p t − φ) with path weight a_p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerModel {
    #[serde(default)]
    pub shape: PropellerShape,
    pub f_p: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "one")]
    pub coeff: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for PropellerModel {
    fn default() -> Self {
        Self {
            shape: PropellerShape::default(),
            f_p: 30.0,
            phase: 0.0,
            coeff: 1.0,
        }
    }
}

impl PropellerModel {
    pub fn new(shape: PropellerShape, f_p: f64, phase: f64, coeff: f64) -> Result<Self> {
        let m = Self {
            shape,
            f_p,
            phase,
            coeff,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        ensure(self.f_p.is_finite() && self.f_p > 0.0, || {
            format!("propeller frequency must be positive, got {}", self.f_p)
        })?;
        ensure(self.phase.is_finite(), || {
            "propeller phase must be finite".into()
        })?;
        ensure(self.coeff.is_finite() && self.coeff > 0.0, || {
            format!("propeller coefficient must be positive, got {}", self.coeff)
        })
    }

    /// g(2π f_p t_k − φ), unweighted.
    ///
    /// Phase is tracked in units of rate·cycles and reduced modulo the rate
    /// before and after the offset, so the rounding of an edge sample is the
    /// same in every period.
    pub fn gain_at(&self, clock: SampleClock, k: usize) -> f64 {
        let rate = clock.rate_hz;
        let x = (self.f_p * k as f64).rem_euclid(rate);
        let offset = (self.phase / std::f64::consts::TAU * rate).rem_euclid(rate);
        // a phase of a whole number of samples must not round across an edge
        let offset = if (offset - offset.round()).abs() <= 1e-9 * rate {
            offset.round()
        } else {
            offset
        };
        let frac = (x - offset).rem_euclid(rate) / rate;
        // rem_euclid can round up to exactly the modulus for tiny negative inputs
        self.shape.gain(if frac >= 1.0 { 0.0 } else { frac })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelConfig {
    propellers: Vec<PropellerModel>,
    #[serde(default)]
    snr_db: Option<f64>,
    #[serde(default)]
    rng_seed: u64,
}

/// Propeller set plus noise settings. Path weights are normalised to sum to
/// one on construction, so an all-flat channel has unit gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannelConfig", into = "RawChannelConfig")]
pub struct ChannelConfig {
    propellers: Vec<PropellerModel>,
    snr_db: Option<f64>,
    rng_seed: u64,
}

impl TryFrom<RawChannelConfig> for ChannelConfig {
    type Error = crate::error::Error;

    fn try_from(raw: RawChannelConfig) -> Result<Self> {
        ChannelConfig::new(raw.propellers, raw.snr_db, raw.rng_seed)
    }
}

impl From<ChannelConfig> for RawChannelConfig {
    fn from(c: ChannelConfig) -> Self {
        RawChannelConfig {
            propellers: c.propellers,
            snr_db: c.snr_db,
            rng_seed: c.rng_seed,
        }
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            propellers: vec![PropellerModel::default()],
            snr_db: Some(20.0),
            rng_seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn new(
        mut propellers: Vec<PropellerModel>,
        snr_db: Option<f64>,
        rng_seed: u64,
    ) -> Result<Self> {
        ensure(!propellers.is_empty(), || {
            "channel needs at least one propeller".into()
        })?;
        for p in &propellers {
            p.validate()?;
        }
        if let Some(snr) = snr_db {
            ensure(snr.is_finite(), || format!("SNR must be finite, got {snr}"))?;
        }
        let total: f64 = propellers.iter().map(|p| p.coeff).sum();
        for p in &mut propellers {
            p.coeff /= total;
        }
        Ok(Self {
            propellers,
            snr_db,
            rng_seed,
        })
    }

    pub fn single(model: PropellerModel, snr_db: Option<f64>, rng_seed: u64) -> Result<Self> {
        Self::new(vec![model], snr_db, rng_seed)
    }

    /// Unit-gain channel with no modulation and no noise.
    pub fn identity() -> Self {
        Self {
            propellers: vec![PropellerModel {
                shape: PropellerShape::SineRipple { beta: 0.0 },
                ..PropellerModel::default()
            }],
            snr_db: None,
            rng_seed: 0,
        }
    }

    pub fn propellers(&self) -> &[PropellerModel] {
        &self.propellers
    }

    pub fn snr_db(&self) -> Option<f64> {
        self.snr_db
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_snr_db(mut self, snr_db: Option<f64>) -> Result<Self> {
        if let Some(snr) = snr_db {
            ensure(snr.is_finite(), || format!("SNR must be finite, got {snr}"))?;
        }
        self.snr_db = snr_db;
        Ok(self)
    }

    /// Retunes the propeller set so the first propeller spins at `f_p`;
    /// the others keep their speed ratio to it.
    pub fn with_fp(mut self, f_p: f64) -> Result<Self> {
        ensure(f_p.is_finite() && f_p > 0.0, || {
            format!("propeller frequency must be positive, got {f_p}")
        })?;
        let base = self.propellers[0].f_p;
        for p in &mut self.propellers {
            p.f_p = f_p * (p.f_p / base);
        }
        Ok(self)
    }

    fn gain_at(&self, clock: SampleClock, k: usize) -> f64 {
        self.propellers
            .iter()
            .map(|p| p.coeff * p.gain_at(clock, k))
            .sum()
    }
}

/// Aggregate real gain m[k] = Σ_p a_p·g_p(2π f_p t_k − φ_p).
pub fn eval_modulator(cfg: &ChannelConfig, clock: SampleClock) -> SampleBuffer {
    SampleBuffer::from_fn(clock, |k| Complex64::new(cfg.gain_at(clock, k), 0.0))
}

/// Spectrum of the aggregate modulator over the capture window.
pub fn modulator_spectrum(cfg: &ChannelConfig, clock: SampleClock) -> Spectrum {
    forward_fft(&eval_modulator(cfg, clock))
}

/// rx[k] = tx[k]·m[k] + n[k], with complex circular AWGN scaled to the
/// modulated signal's mean power.
pub fn apply_channel(tx: &SampleBuffer, cfg: &ChannelConfig) -> SampleBuffer {
    let clock = tx.clock();
    let modulated = SampleBuffer::from_fn(clock, |k| tx.samples()[k] * cfg.gain_at(clock, k));
    let Some(snr_db) = cfg.snr_db else {
        return modulated;
    };
    let noise_power = modulated.mean_power() / 10f64.powf(snr_db / 10.0);
    if noise_power == 0.0 {
        return modulated;
    }
    let sigma = (noise_power / 2.0).sqrt();
    let mut rng = StdRng::seed_from_u64(cfg.rng_seed);
    let mut samples = modulated.into_samples();
    for s in &mut samples {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *s += Complex64::new(sigma * re, sigma * im);
    }
    SampleBuffer::from_vec_unchecked(clock, samples)
}
