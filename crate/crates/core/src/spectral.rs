//! Capture-window Fourier analysis and brick-wall band selection.
//!
//! The forward transform is unnormalized and the inverse carries the 1/N
//! factor. Bin `k` maps to `k·rate/N` Hz folded into (-rate/2, rate/2].

use std::cell::RefCell;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::signal::{SampleBuffer, SampleClock};

thread_local! {
    // rustfft planners cache plans per length; one per thread keeps
    // transforms free of shared mutable state.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform(data: &mut [Complex64], inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(data.len())
        } else {
            p.plan_fft_forward(data.len())
        }
    });
    fft.process(data);
}

/// Full-length discrete spectrum of one capture window.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    clock: SampleClock,
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(clock: SampleClock, bins: Vec<Complex64>) -> Result<Self> {
        clock.validate()?;
        ensure(bins.len() == clock.n_samples, || {
            format!(
                "spectrum holds {} bins, clock expects {}",
                bins.len(),
                clock.n_samples
            )
        })?;
        ensure(
            bins.iter().all(|b| b.re.is_finite() && b.im.is_finite()),
            || "spectrum contains non-finite bins".into(),
        )?;
        Ok(Self { clock, bins })
    }

    pub fn clock(&self) -> SampleClock {
        self.clock
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn freq(&self, k: usize) -> f64 {
        self.clock.bin_freq(k)
    }

    /// Bin value at an exact on-grid frequency.
    pub fn at(&self, freq_hz: f64) -> Option<Complex64> {
        self.clock.bin_index(freq_hz).map(|k| self.bins[k])
    }

    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum()
    }

    /// Writes `freq_hz,re,im,mag_db` rows in ascending frequency order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "freq_hz,re,im,mag_db")?;
        let n = self.bins.len();
        // Negative frequencies first: bins n/2+1..n, then 0..=n/2.
        let order = (n / 2 + 1..n).chain(0..=n / 2).filter(|&k| k < n);
        for k in order {
            let b = self.bins[k];
            let mag_db = 20.0 * (b.norm() + 1e-20).log10();
            writeln!(w, "{},{},{},{}", self.freq(k), b.re, b.im, mag_db)?;
        }
        Ok(())
    }

    pub fn dump_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }
}

/// A band of frequencies `[center - half_width, center + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub center_hz: f64,
    #[serde(default = "BandSpec::default_half_width")]
    pub half_width_hz: f64,
}

impl BandSpec {
    pub const DEFAULT_HALF_WIDTH_HZ: f64 = 300.0;

    fn default_half_width() -> f64 {
        Self::DEFAULT_HALF_WIDTH_HZ
    }

    pub fn new(center_hz: f64, half_width_hz: f64) -> Result<Self> {
        let band = Self {
            center_hz,
            half_width_hz,
        };
        band.validate()?;
        Ok(band)
    }

    pub fn centered(center_hz: f64) -> Self {
        Self {
            center_hz,
            half_width_hz: Self::DEFAULT_HALF_WIDTH_HZ,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.center_hz.is_finite(), || {
            "band center must be finite".into()
        })?;
        ensure(
            self.half_width_hz.is_finite() && self.half_width_hz > 0.0,
            || {
                format!(
                    "band half-width must be positive, got {}",
                    self.half_width_hz
                )
            },
        )
    }

    pub fn lo_hz(&self) -> f64 {
        self.center_hz - self.half_width_hz
    }

    pub fn hi_hz(&self) -> f64 {
        self.center_hz + self.half_width_hz
    }

    /// Checks the band against the Nyquist interval (-rate/2, rate/2].
    pub fn check_nyquist(&self, clock: SampleClock) -> Result<()> {
        self.validate()?;
        let nyq = clock.nyquist_hz();
        if self.lo_hz() <= -nyq || self.hi_hz() > nyq {
            return Err(Error::BandOutsideNyquist {
                lo_hz: self.lo_hz(),
                hi_hz: self.hi_hz(),
                nyquist_hz: nyq,
            });
        }
        Ok(())
    }

    /// Inclusive membership, with a tolerance far below one bin so that
    /// on-grid edge frequencies are always inside.
    pub fn contains(&self, freq_hz: f64, bin_hz: f64) -> bool {
        let tol = 1e-9 * bin_hz;
        freq_hz >= self.lo_hz() - tol && freq_hz <= self.hi_hz() + tol
    }

    pub fn overlaps(&self, other: &BandSpec) -> bool {
        self.lo_hz() <= other.hi_hz() && other.lo_hz() <= self.hi_hz()
    }
}

pub fn forward_fft(buf: &SampleBuffer) -> Spectrum {
    let mut data = buf.samples().to_vec();
    transform(&mut data, false);
    Spectrum {
        clock: buf.clock(),
        bins: data,
    }
}

pub fn inverse_fft(spec: &Spectrum) -> SampleBuffer {
    let mut data = spec.bins.clone();
    transform(&mut data, true);
    let scale = 1.0 / data.len() as f64;
    for x in &mut data {
        *x *= scale;
    }
    SampleBuffer::from_vec_unchecked(spec.clock, data)
}

/// Rectangular single-sided mask: bins inside `band` pass verbatim, the rest
/// (including the mirror band) are zeroed.
pub fn bandpass_window(spec: &Spectrum, band: &BandSpec) -> Result<Spectrum> {
    band.check_nyquist(spec.clock)?;
    let bin_hz = spec.clock.bin_hz();
    let bins = spec
        .bins
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            if band.contains(spec.freq(k), bin_hz) {
                b
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Spectrum {
        clock: spec.clock,
        bins,
    })
}
