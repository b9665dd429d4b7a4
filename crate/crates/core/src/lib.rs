//! Reference-tone equalization of propeller (micro-Doppler) modulation.
//!
//! A continuous reference tone is transmitted beside a narrowband signal.
//! Both pass through the same multiplicative propeller channel, so the tone
//! band, shifted back to baseband, is an estimate of the channel gain that
//! can be divided out of the signal band. The crate simulates this for an
//! ILS localizer signal and measures the resulting DDM error.

pub mod channel;
pub mod ddm;
pub mod equalizer;
pub mod error;
pub mod harness;
pub mod signal;
pub mod spectral;

pub use channel::{
    apply_channel, eval_modulator, modulator_spectrum, ChannelConfig, PropellerModel,
    PropellerShape,
};
pub use ddm::{compute_ddm, ddm_deviation, estimate_amplitudes, ToneAmplitudes};
pub use equalizer::{equalize, extract_doppler, predict_blind_spots, DopplerEstimate, RegPolicy};
pub use error::{Error, Result};
pub use signal::{
    combine, synth_ils, synth_tone, IlsParams, SampleBuffer, SampleClock, ToneParams,
};
pub use spectral::{bandpass_window, forward_fft, inverse_fft, BandSpec, Spectrum};
