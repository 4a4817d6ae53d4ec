//! Rayleigh fading draws and MRT projection gains.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rng::RandomStream;

/// One quasi-static fading realisation of every link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// S → U₁, one entry per source antenna.
    pub h_s1: Vec<Complex64>,
    /// S → R.
    pub h_sr: Vec<Complex64>,
    pub h_r1: Complex64,
    pub h_r2: Complex64,
    pub norm2_s1: f64,
    pub norm2_sr: f64,
    /// Gain at R when the source beam is matched to U₁.
    pub y_sr: f64,
    /// Gain at U₁ when the source beam is matched to R.
    pub y_s1: f64,
}

impl ChannelRealization {
    /// Builds a realisation from explicit channel coefficients.
    pub fn from_coefficients(
        h_s1: Vec<Complex64>,
        h_sr: Vec<Complex64>,
        h_r1: Complex64,
        h_r2: Complex64,
    ) -> Result<Self> {
        if h_s1.len() != h_sr.len() || h_s1.is_empty() {
            return Err(Error::Config(format!(
                "antenna vectors must be non-empty and equally long ({} vs {})",
                h_s1.len(),
                h_sr.len()
            )));
        }
        let norm2_s1 = norm_sqr(&h_s1);
        let norm2_sr = norm_sqr(&h_sr);
        let (y_sr, y_s1) = if h_s1.len() == 1 {
            // a single antenna has only one direction to project on
            (norm2_sr, norm2_s1)
        } else {
            (mrt_projection(&h_s1, &h_sr)?, mrt_projection(&h_sr, &h_s1)?)
        };
        Ok(ChannelRealization {
            h_s1,
            h_sr,
            h_r1,
            h_r2,
            norm2_s1,
            norm2_sr,
            y_sr,
            y_s1,
        })
    }

    pub fn gain_r1(&self) -> f64 {
        self.h_r1.norm_sqr()
    }

    pub fn gain_r2(&self) -> f64 {
        self.h_r2.norm_sqr()
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

/// `|target · w|²` with the MRT weight `w = beam_source^H / ‖beam_source‖`.
pub fn mrt_projection(beam_source: &[Complex64], target: &[Complex64]) -> Result<f64> {
    if beam_source.len() != target.len() {
        return Err(Error::Config(format!(
            "length mismatch: beam source {} vs target {}",
            beam_source.len(),
            target.len()
        )));
    }
    let norm2 = norm_sqr(beam_source);
    if norm2 == 0.0 {
        return Err(Error::Degenerate("MRT beam source has zero norm".into()));
    }
    let inner: Complex64 = target
        .iter()
        .zip(beam_source)
        .map(|(t, s)| t * s.conj())
        .sum();
    Ok(inner.norm_sqr() / norm2)
}

fn complex_gaussian(stream: &mut RandomStream, variance: f64) -> Complex64 {
    let sd = (0.5 * variance).sqrt();
    let re: f64 = stream.sample(StandardNormal);
    let im: f64 = stream.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Draws every link as circularly-symmetric complex Gaussian with variance
/// `d^-alpha`.
///
/// The draw order (relay links first, then S→U₁ and S→R interleaved per
/// antenna) keeps the first antenna's coefficients identical across antenna
/// counts for the same stream.
pub fn draw_channels(params: &SystemParams, stream: &mut RandomStream) -> Result<ChannelRealization> {
    let n = params.n_antennas;
    if n == 0 {
        return Err(Error::param("n_antennas", "must be >= 1"));
    }
    let lambda_s1 = params.mean_gain(params.d_s1);
    let lambda_sr = params.mean_gain(params.d_sr);
    let h_r1 = complex_gaussian(stream, params.mean_gain(params.d_r1));
    let h_r2 = complex_gaussian(stream, params.mean_gain(params.d_r2));
    let mut h_s1 = Vec::with_capacity(n);
    let mut h_sr = Vec::with_capacity(n);
    for _ in 0..n {
        h_s1.push(complex_gaussian(stream, lambda_s1));
        h_sr.push(complex_gaussian(stream, lambda_sr));
    }
    ChannelRealization::from_coefficients(h_s1, h_sr, h_r1, h_r2)
}
