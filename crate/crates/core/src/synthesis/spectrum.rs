use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{SynthesisError, Waveform};

/// One-sided amplitude spectrum.
///
/// A unit-amplitude sinusoid on an exact bin reads 1.0. Bins 0 and N/2
/// (for even N) use 1/N, every other bin 2/N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Spacing between adjacent bins, in Hz.
    pub fn bin_width(&self) -> f64 {
        match self.frequencies.as_slice() {
            [a, b, ..] => b - a,
            _ => 0.0,
        }
    }

    /// Index of the bin closest to `frequency`.
    pub fn bin_of(&self, frequency: f64) -> usize {
        let w = self.bin_width();
        if w <= 0.0 {
            return 0;
        }
        ((frequency - self.frequencies[0]) / w)
            .round()
            .clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Magnitude at the bin closest to `frequency`.
    pub fn magnitude_at(&self, frequency: f64) -> f64 {
        self.magnitudes[self.bin_of(frequency)]
    }

    /// Mean-square value of the time signal this spectrum came from.
    pub fn power(&self, source_len: usize) -> f64 {
        let last = self.len().saturating_sub(1);
        let nyquist_bin = source_len.is_multiple_of(2);
        self.magnitudes
            .iter()
            .enumerate()
            .map(|(k, m)| {
                if k == 0 || (k == last && nyquist_bin) {
                    m * m
                } else {
                    m * m / 2.0
                }
            })
            .sum()
    }
}

/// Rectangular-window DFT over the full waveform.
pub fn spectrum(w: &Waveform) -> Result<Spectrum, SynthesisError> {
    let n = w.samples.len();
    if n == 0 {
        return Err(SynthesisError::EmptyWaveform);
    }
    let mut buffer: Vec<Complex<f64>> = w.samples.iter().map(|&s| Complex::new(s, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    let half = n / 2;
    let scale = 1.0 / n as f64;
    let magnitudes = buffer[..=half]
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let edge = k == 0 || (n.is_multiple_of(2) && k == half);
            let m = c.norm() * scale;
            if edge {
                m
            } else {
                2.0 * m
            }
        })
        .collect();
    let frequencies = (0..=half)
        .map(|k| k as f64 * w.sample_rate / n as f64)
        .collect();
    Ok(Spectrum {
        frequencies,
        magnitudes,
    })
}
