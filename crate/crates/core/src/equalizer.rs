//! Reference-tone equalization.
//!
//! The reference tone experiences the same multiplicative propeller gain as
//! the signal. Isolating the tone band and shifting it back to 0 Hz yields a
//! band-limited estimate of that gain, which is then divided out of the
//! signal band sample by sample.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{modulator_spectrum, ChannelConfig};
use crate::error::{ensure, Error, Result};
use crate::signal::{SampleBuffer, SampleClock, ToneParams};
use crate::spectral::{bandpass_window, inverse_fft, BandSpec, Spectrum};

/// Estimated aggregate modulator, demodulated to baseband and normalised to
/// unit tone amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerEstimate {
    pub g_hat: SampleBuffer,
    pub tone_band: BandSpec,
}

/// Magnitude floor for the equalizer division, relative to peak |g_hat|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegPolicy {
    pub eps_rel: f64,
}

impl Default for RegPolicy {
    fn default() -> Self {
        Self { eps_rel: 1e-3 }
    }
}

impl RegPolicy {
    pub fn new(eps_rel: f64) -> Result<Self> {
        let p = Self { eps_rel };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.eps_rel > 0.0 && self.eps_rel < 1.0, || {
            format!(
                "regularisation floor must lie in (0, 1), got {}",
                self.eps_rel
            )
        })
    }
}

/// Isolates the tone band, returns to the time domain and strips the known
/// tone carrier, leaving the channel gain as seen by the tone.
pub fn extract_doppler(
    rx_spec: &Spectrum,
    tone: &ToneParams,
    band: &BandSpec,
) -> Result<DopplerEstimate> {
    let clock = rx_spec.clock();
    ensure(
        (band.center_hz - tone.offset_hz).abs() <= 1e-9 * clock.bin_hz(),
        || {
            format!(
                "tone band centered at {} Hz but tone sits at {} Hz",
                band.center_hz, tone.offset_hz
            )
        },
    )?;
    let tone_spec = bandpass_window(rx_spec, band)?;
    let band_energy = tone_spec.energy();
    if band_energy.is_nan() || band_energy <= 0.0 || band_energy <= 1e-24 * rx_spec.energy() {
        return Err(Error::ToneAbsent(tone.offset_hz));
    }
    let d = inverse_fft(&tone_spec);
    let inv_amp = 1.0 / tone.amp;
    let g_hat: Vec<Complex64> = d
        .samples()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let carrier =
                Complex64::from_polar(1.0, -(TAU * clock.cycles(tone.offset_hz, k) + tone.phase));
            x * carrier * inv_amp
        })
        .collect();
    let g_hat = SampleBuffer::new(clock, g_hat)?;
    Ok(DopplerEstimate {
        g_hat,
        tone_band: *band,
    })
}

/// Signal-band samples divided by the gain estimate, with the denominator
/// floored at (eps_rel·max|g_hat|)².
pub fn equalize(
    rx_spec: &Spectrum,
    dop: &DopplerEstimate,
    signal_band: &BandSpec,
    reg: &RegPolicy,
) -> Result<SampleBuffer> {
    reg.validate()?;
    crate::signal::check_clocks(rx_spec.clock(), dop.g_hat.clock())?;
    if signal_band.overlaps(&dop.tone_band) {
        return Err(Error::BandOverlap);
    }
    let s_band = inverse_fft(&bandpass_window(rx_spec, signal_band)?);
    let g = dop.g_hat.samples();
    let peak = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let floor = (reg.eps_rel * peak).powi(2);
    let out = s_band
        .samples()
        .iter()
        .zip(g)
        .map(|(&s, &gk)| {
            let den = gk.norm_sqr().max(floor);
            let num = s * gk.conj();
            Complex64::new(num.re / den, num.im / den)
        })
        .collect();
    SampleBuffer::new(rx_spec.clock(), out)
}

/// Critical frequencies where the modulator spectrum carries a component
/// above `rel_threshold × |G(0)|`. Inverting such a modulator couples ILS
/// tones into one another, so equalization there may underperform.
pub fn predict_blind_spots(
    cfg: &ChannelConfig,
    clock: SampleClock,
    critical_freqs: &[f64],
    rel_threshold: f64,
) -> Result<Vec<f64>> {
    ensure(rel_threshold.is_finite() && rel_threshold > 0.0, || {
        format!("blind-spot threshold must be positive, got {rel_threshold}")
    })?;
    let bins = critical_freqs
        .iter()
        .map(|&f| {
            let pos = clock.bin_index(f).ok_or(Error::NotOnBin(f))?;
            let neg = clock.bin_index(-f).ok_or(Error::NotOnBin(f))?;
            Ok((f, pos, neg))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = modulator_spectrum(cfg, clock);
    let dc = spec.bins()[0].norm();
    Ok(bins
        .into_iter()
        .filter(|&(_, pos, neg)| {
            let mag = spec.bins()[pos].norm().max(spec.bins()[neg].norm());
            mag > rel_threshold * dc
        })
        .map(|(f, _, _)| f)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{apply_channel, PropellerModel, PropellerShape};
    use crate::ddm::{compute_ddm, estimate_amplitudes};
    use crate::signal::{combine, synth_ils, synth_tone, IlsParams};
    use crate::spectral::forward_fft;

    fn channel(shape: PropellerShape, f_p: f64) -> ChannelConfig {
        ChannelConfig::single(PropellerModel::new(shape, f_p, 0.0, 1.0).unwrap(), None, 0).unwrap()
    }

    fn received(cfg: &ChannelConfig) -> Spectrum {
        let clock = SampleClock::default();
        let tx = combine(
            &synth_ils(&IlsParams::default(), clock),
            &synth_tone(&ToneParams::default(), clock),
        )
        .unwrap();
        forward_fft(&apply_channel(&tx, cfg))
    }

    #[test]
    fn flat_channel_gives_unit_gain_estimate() {
        let spec = received(&ChannelConfig::identity());
        let dop =
            extract_doppler(&spec, &ToneParams::default(), &BandSpec::centered(1500.0)).unwrap();
        for g in dop.g_hat.samples() {
            assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_off_center_band_and_missing_tone() {
        let spec = received(&ChannelConfig::identity());
        let tone = ToneParams::default();
        assert!(extract_doppler(&spec, &tone, &BandSpec::centered(1400.0)).is_err());

        let clock = SampleClock::default();
        let ils_only = forward_fft(&synth_ils(&IlsParams::default(), clock));
        assert!(matches!(
            extract_doppler(&ils_only, &tone, &BandSpec::centered(1500.0)),
            Err(Error::ToneAbsent(_))
        ));
    }

    #[test]
    fn rejects_overlapping_bands() {
        let spec = received(&ChannelConfig::identity());
        let dop =
            extract_doppler(&spec, &ToneParams::default(), &BandSpec::centered(1500.0)).unwrap();
        let wide = BandSpec::new(0.0, 1300.0).unwrap();
        assert!(matches!(
            equalize(&spec, &dop, &wide, &RegPolicy::default()),
            Err(Error::BandOverlap)
        ));
    }

    #[test]
    fn reg_policy_bounds() {
        assert!(RegPolicy::new(0.0).is_err());
        assert!(RegPolicy::new(1.0).is_err());
        assert!(RegPolicy::new(1e-3).is_ok());
    }

    #[test]
    fn identity_equalization_matches_windowed_signal() {
        let spec = received(&ChannelConfig::identity());
        let band = BandSpec::centered(0.0);
        let dop =
            extract_doppler(&spec, &ToneParams::default(), &BandSpec::centered(1500.0)).unwrap();
        let out = equalize(&spec, &dop, &band, &RegPolicy::default()).unwrap();
        let expected = inverse_fft(&bandpass_window(&spec, &band).unwrap());
        let err: f64 = out
            .samples()
            .iter()
            .zip(expected.samples())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!((err / expected.energy()).sqrt() < 1e-10);
    }

    #[test]
    fn floor_engages_only_below_threshold() {
        // g_hat dips to 0.01 of its peak; a 0.1 floor should cap the gain at
        // 1/(0.1·peak) there and leave the rest untouched.
        let clock = SampleClock::new(8.0, 8).unwrap();
        let g: Vec<Complex64> = [1.0, 1.0, 0.01, 1.0, 1.0, 1.0, 1.0, 1.0]
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let dop = DopplerEstimate {
            g_hat: SampleBuffer::new(clock, g).unwrap(),
            tone_band: BandSpec::new(3.0, 0.5).unwrap(),
        };
        let mut bins = vec![Complex64::new(0.0, 0.0); 8];
        bins[0] = Complex64::new(8.0, 0.0);
        let spec = Spectrum::new(clock, bins).unwrap();
        let out = equalize(
            &spec,
            &dop,
            &BandSpec::new(0.0, 1.0).unwrap(),
            &RegPolicy::new(0.1).unwrap(),
        )
        .unwrap();
        assert!((out.samples()[0].re - 1.0).abs() < 1e-12);
        // 0.01 / (0.1)² = 1
        assert!((out.samples()[2].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ripple_channel_equalizes_exactly() {
        let spec = received(&channel(PropellerShape::SineRipple { beta: 0.5 }, 25.0));
        let dop =
            extract_doppler(&spec, &ToneParams::default(), &BandSpec::centered(1500.0)).unwrap();
        let out = equalize(&spec, &dop, &BandSpec::centered(0.0), &RegPolicy::default()).unwrap();
        let ddm = compute_ddm(&estimate_amplitudes(&out)).unwrap();
        assert!((ddm + 0.2).abs() <= 1e-6, "{ddm}");
    }

    #[test]
    fn blind_spots_for_flat_and_ripple_channels() {
        let clock = SampleClock::default();
        let crit = [90.0, 150.0];
        assert!(
            predict_blind_spots(&ChannelConfig::identity(), clock, &crit, 0.01)
                .unwrap()
                .is_empty()
        );
        let rip = channel(PropellerShape::SineRipple { beta: 0.5 }, 25.0);
        assert!(predict_blind_spots(&rip, clock, &crit, 0.01)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn fourth_harmonic_blind_spot() {
        let clock = SampleClock::default();
        let sq = |duty| PropellerShape::SquareWave {
            duty,
            lo: 0.5,
            hi: 1.0,
        };
        let crit = [90.0, 150.0];
        // default 0.3 duty: 4th harmonic of 22.5 Hz lands on 90 Hz
        assert_eq!(
            predict_blind_spots(&channel(sq(0.3), 22.5), clock, &crit, 0.01).unwrap(),
            vec![90.0]
        );
        assert_eq!(
            predict_blind_spots(&channel(sq(0.3), 37.5), clock, &crit, 0.01).unwrap(),
            vec![150.0]
        );
        // at quarter duty the 4th harmonic vanishes, so nothing is flagged
        assert!(
            predict_blind_spots(&channel(sq(0.25), 22.5), clock, &crit, 0.01)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn blind_spots_require_on_grid_frequencies() {
        let r = predict_blind_spots(
            &ChannelConfig::identity(),
            SampleClock::default(),
            &[90.5],
            0.01,
        );
        assert!(matches!(r, Err(Error::NotOnBin(_))));
    }
}
