//! Transmitted waveforms at complex baseband: the ILS navigation signal with
//! its carrier at 0 Hz, and the continuous reference tone placed beside it.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Highest ILS modulation frequency; the reference tone must clear it.
pub const ILS_MAX_TONE_HZ: f64 = 150.0;

/// Uniform sample clock of one capture window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleClock {
    pub rate_hz: f64,
    pub n_samples: usize,
}

impl Default for SampleClock {
    fn default() -> Self {
        Self {
            rate_hz: 32_000.0,
            n_samples: 32_000,
        }
    }
}

impl SampleClock {
    pub fn new(rate_hz: f64, n_samples: usize) -> Result<Self> {
        let clock = Self { rate_hz, n_samples };
        clock.validate()?;
        Ok(clock)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.rate_hz.is_finite() && self.rate_hz > 0.0, || {
            format!("sample rate must be positive, got {}", self.rate_hz)
        })?;
        ensure(self.n_samples > 0, || {
            "capture length must be nonzero".into()
        })
    }

    /// Capture window duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.n_samples as f64 / self.rate_hz
    }

    /// Spacing of DFT bins in Hz.
    pub fn bin_hz(&self) -> f64 {
        self.rate_hz / self.n_samples as f64
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.rate_hz / 2.0
    }

    pub fn time_s(&self, k: usize) -> f64 {
        k as f64 / self.rate_hz
    }

    /// Fractional number of cycles completed by a `freq_hz` oscillator at
    /// sample `k`, reduced to [0, 1). The reduction happens modulo the
    /// sample rate, which is exact in floating point, so every cycle of an
    /// integer-period waveform sees identical phases.
    pub fn cycles(&self, freq_hz: f64, k: usize) -> f64 {
        let c = (freq_hz * k as f64).rem_euclid(self.rate_hz) / self.rate_hz;
        if c >= 1.0 {
            0.0
        } else {
            c
        }
    }

    /// Frequency of bin `k`, folded to (-rate/2, rate/2].
    pub fn bin_freq(&self, k: usize) -> f64 {
        let n = self.n_samples;
        if 2 * k <= n {
            k as f64 * self.bin_hz()
        } else {
            (k as f64 - n as f64) * self.bin_hz()
        }
    }

    /// Index of the bin holding `freq_hz`, if it sits exactly on the bin grid.
    pub fn bin_index(&self, freq_hz: f64) -> Option<usize> {
        let pos = freq_hz / self.bin_hz();
        let rounded = pos.round();
        if (pos - rounded).abs() > 1e-9 * pos.abs().max(1.0) {
            return None;
        }
        let n = self.n_samples as i64;
        let idx = (rounded as i64).rem_euclid(n) as usize;
        Some(idx)
    }

    /// Index of the bin nearest to `freq_hz`.
    pub fn nearest_bin(&self, freq_hz: f64) -> usize {
        let n = self.n_samples as i64;
        ((freq_hz / self.bin_hz()).round() as i64).rem_euclid(n) as usize
    }
}

impl fmt::Display for SampleClock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} samples @ {} Hz", self.n_samples, self.rate_hz)
    }
}

/// Complex baseband time series of one capture window.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    clock: SampleClock,
    samples: Vec<Complex64>,
}

impl SampleBuffer {
    pub fn new(clock: SampleClock, samples: Vec<Complex64>) -> Result<Self> {
        clock.validate()?;
        ensure(samples.len() == clock.n_samples, || {
            format!(
                "buffer holds {} samples, clock expects {}",
                samples.len(),
                clock.n_samples
            )
        })?;
        ensure(
            samples.iter().all(|s| s.re.is_finite() && s.im.is_finite()),
            || "buffer contains non-finite samples".into(),
        )?;
        Ok(Self { clock, samples })
    }

    /// Builds a buffer from a per-sample generator; the clock is assumed valid.
    pub(crate) fn from_fn(clock: SampleClock, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            clock,
            samples: (0..clock.n_samples).map(f).collect(),
        }
    }

    pub(crate) fn from_vec_unchecked(clock: SampleClock, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), clock.n_samples);
        Self { clock, samples }
    }

    pub fn zeros(clock: SampleClock) -> Self {
        Self::from_fn(clock, |_| Complex64::new(0.0, 0.0))
    }

    pub fn clock(&self) -> SampleClock {
        self.clock
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_fn(self.clock, |i| self.samples[i] * k)
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub(crate) fn check_same_clock(&self, other: &SampleBuffer) -> Result<()> {
        check_clocks(self.clock, other.clock)
    }
}

pub(crate) fn check_clocks(a: SampleClock, b: SampleClock) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ClockMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

/// Transmitted ILS amplitudes (volts) and modulation phases (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IlsParams {
    pub a_c: f64,
    pub a_90: f64,
    pub a_150: f64,
    pub phase_90: f64,
    pub phase_150: f64,
}

impl Default for IlsParams {
    fn default() -> Self {
        Self {
            a_c: 1.0,
            a_90: 0.6,
            a_150: 0.8,
            phase_90: 0.0,
            phase_150: 0.0,
        }
    }
}

impl IlsParams {
    pub fn new(a_c: f64, a_90: f64, a_150: f64) -> Result<Self> {
        let p = Self {
            a_c,
            a_90,
            a_150,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_phases(mut self, phase_90: f64, phase_150: f64) -> Self {
        self.phase_90 = phase_90;
        self.phase_150 = phase_150;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.a_c.is_finite() && self.a_c > 0.0, || {
            format!("carrier amplitude must be positive, got {}", self.a_c)
        })?;
        ensure(self.a_90.is_finite() && self.a_90 >= 0.0, || {
            format!("90 Hz amplitude must be nonnegative, got {}", self.a_90)
        })?;
        ensure(self.a_150.is_finite() && self.a_150 >= 0.0, || {
            format!("150 Hz amplitude must be nonnegative, got {}", self.a_150)
        })?;
        ensure(
            self.phase_90.is_finite() && self.phase_150.is_finite(),
            || "ILS phases must be finite".into(),
        )
    }
}

/// Placement of the continuous reference tone relative to the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToneParams {
    pub offset_hz: f64,
    pub amp: f64,
    pub phase: f64,
}

impl Default for ToneParams {
    fn default() -> Self {
        Self {
            offset_hz: 1500.0,
            amp: 1.0,
            phase: 0.0,
        }
    }
}

impl ToneParams {
    pub fn new(offset_hz: f64, amp: f64, phase: f64, max_doppler_spread_hz: f64) -> Result<Self> {
        let p = Self {
            offset_hz,
            amp,
            phase,
        };
        p.validate(max_doppler_spread_hz)?;
        Ok(p)
    }

    /// The tone must sit at least twice the occupied signal bandwidth
    /// (highest ILS tone plus Doppler spread) away from the carrier.
    pub fn validate(&self, max_doppler_spread_hz: f64) -> Result<()> {
        ensure(self.amp.is_finite() && self.amp > 0.0, || {
            format!("tone amplitude must be positive, got {}", self.amp)
        })?;
        ensure(self.phase.is_finite(), || {
            "tone phase must be finite".into()
        })?;
        let min_offset = 2.0 * (ILS_MAX_TONE_HZ + max_doppler_spread_hz);
        ensure(
            self.offset_hz.is_finite() && self.offset_hz.abs() >= min_offset,
            || {
                format!(
                    "tone offset {} Hz is closer than {} Hz to the carrier",
                    self.offset_hz, min_offset
                )
            },
        )
    }
}

/// Real ILS envelope a_c + a_90 cos(2π·90t + φ90) + a_150 cos(2π·150t + φ150).
pub fn synth_ils(params: &IlsParams, clock: SampleClock) -> SampleBuffer {
    SampleBuffer::from_fn(clock, |k| {
        let c90 = (TAU * clock.cycles(90.0, k) + params.phase_90).cos();
        let c150 = (TAU * clock.cycles(150.0, k) + params.phase_150).cos();
        Complex64::new(params.a_c + params.a_90 * c90 + params.a_150 * c150, 0.0)
    })
}

/// Single-sided complex exponential amp·exp(j(2π·offset·t + phase)).
pub fn synth_tone(params: &ToneParams, clock: SampleClock) -> SampleBuffer {
    SampleBuffer::from_fn(clock, |k| {
        Complex64::from_polar(
            params.amp,
            TAU * clock.cycles(params.offset_hz, k) + params.phase,
        )
    })
}

/// Element-wise sum of two buffers on the same clock.
pub fn combine(a: &SampleBuffer, b: &SampleBuffer) -> Result<SampleBuffer> {
    a.check_same_clock(b)?;
    Ok(SampleBuffer::from_fn(a.clock, |k| {
        a.samples[k] + b.samples[k]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn default_clock_has_one_hz_bins() {
        let clock = SampleClock::default();
        assert_eq!(clock.bin_hz(), 1.0);
        assert_eq!(clock.duration_s(), 1.0);
        assert_eq!(clock.bin_freq(16_000), 16_000.0);
        assert_eq!(clock.bin_freq(16_001), -15_999.0);
        assert_eq!(clock.bin_index(-90.0), Some(32_000 - 90));
        assert_eq!(clock.bin_index(22.5), None);
    }

    #[test]
    fn clock_rejects_degenerate_values() {
        assert!(SampleClock::new(0.0, 10).is_err());
        assert!(SampleClock::new(-1.0, 10).is_err());
        assert!(SampleClock::new(1000.0, 0).is_err());
        assert!(SampleClock::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn buffer_rejects_bad_length_and_nan() {
        let clock = SampleClock::new(8.0, 4).unwrap();
        assert!(SampleBuffer::new(clock, vec![c(0.0, 0.0); 3]).is_err());
        let mut v = vec![c(0.0, 0.0); 4];
        v[2] = c(f64::NAN, 0.0);
        assert!(SampleBuffer::new(clock, v).is_err());
    }

    #[test]
    fn carrier_only_is_constant() {
        let p = IlsParams::new(1.0, 0.0, 0.0).unwrap();
        let buf = synth_ils(&p, SampleClock::default());
        assert!(buf.samples().iter().all(|&s| s == c(1.0, 0.0)));
    }

    #[test]
    fn ils_first_sample_sums_amplitudes() {
        let buf = synth_ils(&IlsParams::default(), SampleClock::default());
        assert!((buf.samples()[0].re - 2.4).abs() < 1e-15);
        assert_eq!(buf.samples()[0].im, 0.0);
    }

    #[test]
    fn ils_params_validation() {
        assert!(IlsParams::new(0.0, 0.6, 0.8).is_err());
        assert!(IlsParams::new(1.0, -0.1, 0.8).is_err());
        assert!(IlsParams::new(1.0, 0.6, -0.8).is_err());
        assert!(IlsParams::new(1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn tone_params_enforce_separation() {
        assert!(ToneParams::new(1500.0, 1.0, 0.0, 300.0).is_ok());
        // 2 × (150 + 300) = 900
        assert!(ToneParams::new(899.0, 1.0, 0.0, 300.0).is_err());
        assert!(ToneParams::new(900.0, 1.0, 0.0, 300.0).is_ok());
        assert!(ToneParams::new(1500.0, 0.0, 0.0, 300.0).is_err());
    }

    #[test]
    fn tone_is_constant_modulus() {
        let clock = SampleClock::default();
        let buf = synth_tone(&ToneParams::default(), clock);
        assert_eq!(buf.samples()[0], c(1.0, 0.0));
        assert!(buf.samples().iter().all(|s| (s.norm() - 1.0).abs() < 1e-14));
        let energy = buf.energy();
        assert!((energy - clock.n_samples as f64).abs() < 1e-8);
    }

    #[test]
    fn combine_identities() {
        let clock = SampleClock::default();
        let x = synth_ils(&IlsParams::default(), clock);
        assert_eq!(combine(&x, &SampleBuffer::zeros(clock)).unwrap(), x);
        let z = combine(&x, &x.scale(-1.0)).unwrap();
        assert!(z.samples().iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn combine_rejects_clock_mismatch() {
        let a = SampleBuffer::zeros(SampleClock::new(8.0, 4).unwrap());
        let b = SampleBuffer::zeros(SampleClock::new(16.0, 4).unwrap());
        assert!(matches!(combine(&a, &b), Err(Error::ClockMismatch { .. })));
    }

    #[test]
    fn ils_scales_linearly() {
        let clock = SampleClock::default();
        let base = synth_ils(&IlsParams::default(), clock);
        let scaled = synth_ils(&IlsParams::new(2.5, 1.5, 2.0).unwrap(), clock);
        for (a, b) in base.samples().iter().zip(scaled.samples()) {
            assert!((a * 2.5 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn tone_is_orthogonal_to_ils_components() {
        let clock = SampleClock::default();
        let tone = synth_tone(&ToneParams::default(), clock);
        let components = [
            IlsParams::new(1.0, 0.0, 0.0).unwrap(),
            IlsParams::new(1e-300, 1.0, 0.0).unwrap(),
            IlsParams::new(1e-300, 0.0, 1.0).unwrap(),
        ];
        for p in components {
            let s = synth_ils(&p, clock);
            let ip: Complex64 = s
                .samples()
                .iter()
                .zip(tone.samples())
                .map(|(a, b)| a * b.conj())
                .sum();
            assert!(ip.norm() / clock.n_samples as f64 <= 1e-9, "{ip}");
        }
    }
}
