use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_channel, modulator_spectrum, ChannelConfig};
use crate::ddm::{compute_ddm, ddm_deviation, estimate_amplitudes, ToneAmplitudes};
use crate::equalizer::{
    equalize, extract_doppler, predict_blind_spots, DopplerEstimate, RegPolicy,
};
use crate::error::{ensure, Error, Result};
use crate::signal::{
    combine, synth_ils, synth_tone, IlsParams, SampleBuffer, SampleClock, ToneParams,
};
use crate::spectral::{bandpass_window, forward_fft, inverse_fft, BandSpec, Spectrum};

/// Which ILS frequencies count as blind spots, and how strong a modulator
/// component there must be to flag one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlindSpotPolicy {
    pub critical_hz: Vec<f64>,
    pub threshold: f64,
}

impl Default for BlindSpotPolicy {
    fn default() -> Self {
        Self {
            critical_hz: vec![90.0, 150.0],
            threshold: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub clock: SampleClock,
    pub ils: IlsParams,
    pub tone: ToneParams,
    pub channel: ChannelConfig,
    pub signal_band: BandSpec,
    pub tone_band: BandSpec,
    pub reg: RegPolicy,
    /// Reference DDM for deviations; derived from `ils` when absent.
    pub true_ddm: Option<f64>,
    pub blind_spots: BlindSpotPolicy,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let tone = ToneParams::default();
        Self {
            clock: SampleClock::default(),
            ils: IlsParams::default(),
            tone,
            channel: ChannelConfig::default(),
            signal_band: BandSpec::centered(0.0),
            tone_band: BandSpec::centered(tone.offset_hz),
            reg: RegPolicy::default(),
            true_ddm: None,
            blind_spots: BlindSpotPolicy::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.clock.validate()?;
        self.ils.validate()?;
        // the tone band's half-width bounds the Doppler spread we can track
        self.tone.validate(self.tone_band.half_width_hz)?;
        self.signal_band.check_nyquist(self.clock)?;
        self.tone_band.check_nyquist(self.clock)?;
        if self.signal_band.overlaps(&self.tone_band) {
            return Err(Error::BandOverlap);
        }
        ensure(
            (self.tone_band.center_hz - self.tone.offset_hz).abs() <= 1e-9 * self.clock.bin_hz(),
            || {
                format!(
                    "tone band center {} Hz differs from tone offset {} Hz",
                    self.tone_band.center_hz, self.tone.offset_hz
                )
            },
        )?;
        self.reg.validate()?;
        if let Some(d) = self.true_ddm {
            ensure(d.is_finite(), || "true_ddm must be finite".into())?;
        }
        ensure(self.blind_spots.threshold > 0.0, || {
            "blind-spot threshold must be positive".into()
        })
    }

    /// Reference DDM: the override when set, otherwise the transmitted one.
    pub fn true_ddm(&self) -> Result<f64> {
        match self.true_ddm {
            Some(d) => Ok(d),
            None => compute_ddm(&ToneAmplitudes {
                a_c: self.ils.a_c,
                a_90: self.ils.a_90,
                a_150: self.ils.a_150,
            }),
        }
    }

    pub fn f_p(&self) -> f64 {
        self.channel.propellers()[0].f_p
    }

    pub fn with_fp(mut self, f_p: f64) -> Result<Self> {
        self.channel = self.channel.with_fp(f_p)?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.channel = self.channel.with_seed(seed);
        self
    }

    pub fn blind_spots(&self) -> Result<Vec<f64>> {
        predict_blind_spots(
            &self.channel,
            self.clock,
            &self.blind_spots.critical_hz,
            self.blind_spots.threshold,
        )
    }
}

/// Intermediate products of one pipeline pass.
#[derive(Debug, Clone)]
pub struct Stages {
    pub rx_spec: Spectrum,
    pub raw: SampleBuffer,
    pub doppler: DopplerEstimate,
    pub equalized: SampleBuffer,
}

impl Stages {
    pub fn run(cfg: &ScenarioConfig) -> Result<Self> {
        let tx = combine(
            &synth_ils(&cfg.ils, cfg.clock),
            &synth_tone(&cfg.tone, cfg.clock),
        )?;
        let rx = apply_channel(&tx, &cfg.channel);
        let rx_spec = forward_fft(&rx);
        let raw = inverse_fft(&bandpass_window(&rx_spec, &cfg.signal_band)?);
        let doppler = extract_doppler(&rx_spec, &cfg.tone, &cfg.tone_band)?;
        let equalized = equalize(&rx_spec, &doppler, &cfg.signal_band, &cfg.reg)?;
        Ok(Self {
            rx_spec,
            raw,
            doppler,
            equalized,
        })
    }

    pub fn modulator_spectrum(cfg: &ScenarioConfig) -> Spectrum {
        modulator_spectrum(&cfg.channel, cfg.clock)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub f_p_hz: f64,
    pub seed: u64,
    pub ddm_raw: f64,
    pub ddm_eq: f64,
    pub dev_raw: f64,
    pub dev_eq: f64,
}

/// Synthesis, channel, equalization and DDM measurement for one scenario.
/// The raw DDM is read from the signal-band-windowed received buffer.
pub fn run_single(cfg: &ScenarioConfig) -> Result<RunResult> {
    let truth = cfg.true_ddm()?;
    let stages = Stages::run(cfg)?;
    let ddm_raw = compute_ddm(&estimate_amplitudes(&stages.raw))?;
    let ddm_eq = compute_ddm(&estimate_amplitudes(&stages.equalized))?;
    Ok(RunResult {
        f_p_hz: cfg.f_p(),
        seed: cfg.channel.rng_seed(),
        ddm_raw,
        ddm_eq,
        dev_raw: ddm_deviation(ddm_raw, truth),
        dev_eq: ddm_deviation(ddm_eq, truth),
    })
}

/// Per-f_p aggregate across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct FpSummary {
    pub f_p_hz: f64,
    pub median_dev_raw: f64,
    pub median_dev_eq: f64,
    /// Critical frequencies flagged as blind spots at this speed; empty when
    /// the sweep was not annotated.
    pub blind_spots: Vec<f64>,
}

impl FpSummary {
    pub fn is_blind_spot(&self) -> bool {
        !self.blind_spots.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub runs: Vec<RunResult>,
    pub summaries: Vec<FpSummary>,
}

impl SweepResult {
    /// Groups consecutive runs sharing an f_p and takes medians.
    pub fn from_runs(runs: Vec<RunResult>) -> Self {
        let mut summaries: Vec<FpSummary> = Vec::new();
        let mut start = 0;
        while start < runs.len() {
            let f_p = runs[start].f_p_hz;
            let end = start + runs[start..].iter().take_while(|r| r.f_p_hz == f_p).count();
            let group = &runs[start..end];
            summaries.push(FpSummary {
                f_p_hz: f_p,
                median_dev_raw: median(group.iter().map(|r| r.dev_raw)),
                median_dev_eq: median(group.iter().map(|r| r.dev_eq)),
                blind_spots: Vec::new(),
            });
            start = end;
        }
        Self { runs, summaries }
    }

    pub fn summary_at(&self, f_p_hz: f64) -> Option<&FpSummary> {
        self.summaries
            .iter()
            .find(|s| (s.f_p_hz - f_p_hz).abs() < 1e-9)
    }

    pub fn blind_spot_fps(&self) -> Vec<f64> {
        self.summaries
            .iter()
            .filter(|s| s.is_blind_spot())
            .map(|s| s.f_p_hz)
            .collect()
    }
}

pub fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Inclusive grid `start + i·step`, i = 0..=floor((stop − start)/step).
pub fn fp_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    ensure(step.is_finite() && step > 0.0, || {
        format!("grid step must be positive, got {step}")
    })?;
    ensure(
        start.is_finite() && stop.is_finite() && start <= stop,
        || format!("grid start {start} must not exceed stop {stop}"),
    )?;
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Runs every (f_p, seed) pair of the grid. Results come back in grid order
/// (f_p major, seed minor) whatever the execution mode, and each summary is
/// annotated with the blind spots predicted for its speed.
pub fn sweep_fp(
    cfg: &ScenarioConfig,
    fp_start: f64,
    fp_stop: f64,
    fp_step: f64,
    seeds: &[u64],
    exec: Execution,
) -> Result<SweepResult> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    cfg.validate()?;
    let grid = fp_grid(fp_start, fp_stop, fp_step)?;
    let jobs: Vec<ScenarioConfig> = grid
        .iter()
        .flat_map(|&f_p| seeds.iter().map(move |&seed| (f_p, seed)))
        .map(|(f_p, seed)| Ok(cfg.clone().with_fp(f_p)?.with_seed(seed)))
        .collect::<Result<_>>()?;
    let runs: Vec<RunResult> = match exec {
        Execution::Serial => jobs.iter().map(run_single).collect::<Result<_>>()?,
        Execution::Parallel => jobs.par_iter().map(run_single).collect::<Result<_>>()?,
    };
    let mut result = SweepResult::from_runs(runs);
    for summary in &mut result.summaries {
        summary.blind_spots = cfg.clone().with_fp(summary.f_p_hz)?.blind_spots()?;
    }
    Ok(result)
}
