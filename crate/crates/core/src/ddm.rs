//! ILS tone amplitude estimation and difference in depth of modulation.

use crate::error::{Error, Result};
use crate::signal::SampleBuffer;
use crate::spectral::forward_fft;

/// Carrier amplitudes at or below this are treated as a lost carrier.
pub const CARRIER_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneAmplitudes {
    pub a_c: f64,
    pub a_90: f64,
    pub a_150: f64,
}

/// Reads the carrier and the ±90/±150 Hz pairs straight from their FFT bins.
///
/// No neighbouring bins are summed: leakage of other components into these
/// bins is the impairment being measured. Off-grid frequencies fall back to
/// the nearest bin.
pub fn estimate_amplitudes(buf: &SampleBuffer) -> ToneAmplitudes {
    let spec = forward_fft(buf);
    let clock = buf.clock();
    let n = buf.len() as f64;
    let mag = |f: f64| spec.bins()[clock.nearest_bin(f)].norm() / n;
    ToneAmplitudes {
        a_c: mag(0.0),
        a_90: mag(90.0) + mag(-90.0),
        a_150: mag(150.0) + mag(-150.0),
    }
}

/// DDM = (A90 − Ac)/Ac − (A150 − Ac)/Ac, evaluated as (A90 − A150)/Ac.
pub fn compute_ddm(amps: &ToneAmplitudes) -> Result<f64> {
    if amps.a_c.is_nan() || amps.a_c <= CARRIER_FLOOR {
        return Err(Error::CarrierLost(amps.a_c));
    }
    Ok((amps.a_90 - amps.a_150) / amps.a_c)
}

pub fn ddm_deviation(est: f64, truth: f64) -> f64 {
    (est - truth).abs()
}
