//! Independent oracles shared by the integration tests. Nothing here calls
//! the FFT path under test.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use propeq::{
    apply_channel, combine, forward_fft, synth_ils, synth_tone, ChannelConfig, IlsParams,
    PropellerModel, PropellerShape, SampleBuffer, SampleClock, Spectrum, ToneParams,
};

/// Discrete-time Fourier series coefficient of a sampled square wave whose
/// period is `period` samples, low for the first `low` samples.
///
/// C_k = (lo − hi)/P · Σ_{n<L} e^{−j2πkn/P}, summed in closed form.
pub fn dtfs_square(k: i64, low: usize, period: usize, lo: f64, hi: f64) -> Complex64 {
    let p = period as f64;
    let l = low as f64;
    if k.rem_euclid(period as i64) == 0 {
        return Complex64::new((l * lo + (p - l) * hi) / p, 0.0);
    }
    let kf = k as f64;
    let ratio = (PI * kf * l / p).sin() / (PI * kf / p).sin();
    Complex64::from_polar((lo - hi) / p * ratio, -PI * kf * (l - 1.0) / p)
}

/// Continuous-time Fourier coefficient of a square wave that is `lo` over
/// the first `duty` of each cycle.
pub fn ctfs_square(k: i64, duty: f64, lo: f64, hi: f64) -> Complex64 {
    if k == 0 {
        return Complex64::new(duty * lo + (1.0 - duty) * hi, 0.0);
    }
    let kf = k as f64;
    Complex64::from_polar(
        (lo - hi) * (PI * kf * duty).sin() / (PI * kf),
        -PI * kf * duty,
    )
}

/// Σ_{|k| ≤ kmax} C_k e^{j2πkn/P}, evaluated directly in time.
pub fn square_partial_sum(
    clock: SampleClock,
    f_p: f64,
    kmax: i64,
    coeff: impl Fn(i64) -> Complex64,
) -> Vec<Complex64> {
    let coeffs: Vec<(i64, Complex64)> = (-kmax..=kmax).map(|k| (k, coeff(k))).collect();
    (0..clock.n_samples)
        .map(|n| {
            let t = n as f64 / clock.rate_hz;
            coeffs
                .iter()
                .map(|&(k, c)| {
                    c * Complex64::from_polar(1.0, TAU * ((k as f64 * f_p * t).rem_euclid(1.0)))
                })
                .sum()
        })
        .collect()
}

pub fn rms_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    (a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        / a.len() as f64)
        .sqrt()
}

/// Naive O(N²) DFT used to cross-check the FFT on short buffers.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &v)| {
                    v * Complex64::from_polar(1.0, -TAU * ((k * i) % n) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

pub fn single(shape: PropellerShape, f_p: f64, snr_db: Option<f64>, seed: u64) -> ChannelConfig {
    ChannelConfig::single(
        PropellerModel::new(shape, f_p, 0.0, 1.0).unwrap(),
        snr_db,
        seed,
    )
    .unwrap()
}

pub fn square(duty: f64, lo: f64, hi: f64) -> PropellerShape {
    PropellerShape::SquareWave { duty, lo, hi }
}

pub fn tx_default(clock: SampleClock) -> SampleBuffer {
    combine(
        &synth_ils(&IlsParams::default(), clock),
        &synth_tone(&ToneParams::default(), clock),
    )
    .unwrap()
}

pub fn rx_spectrum(cfg: &ChannelConfig) -> Spectrum {
    forward_fft(&apply_channel(&tx_default(SampleClock::default()), cfg))
}
