//! Seeded simulation of the quantized complex AWGN channel.
//!
//! Each channel use draws `X ~ CN(0, sigma_x^2)` and `Z ~ CN(0, sigma^2)`,
//! forms `V = h X + Z`, and quantizes the real and imaginary parts of
//! `g V / sigma_v` independently with the same rule. Randomness comes from
//! ChaCha8 streams: one stream per batch (moment estimation) or per trial
//! (decoding), so results are identical regardless of thread count.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::gmi::decoder_scale_alpha;
use crate::quantizer::SymmetricQuantizer;

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 16;

/// Smallest accepted sample count for moment estimation.
pub const MIN_SAMPLES: usize = 10_000;

/// Largest codebook a decoding experiment may draw.
pub const MAX_MESSAGES: usize = 1 << 16;

/// Smallest accepted number of decoding trials.
pub const MIN_TRIALS: usize = 100;

/// Link parameters of the scalar complex channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub h: Complex64,
    pub sigma_x2: f64,
    pub sigma2: f64,
    pub gain: f64,
}

impl ChannelParams {
    pub fn new(h: Complex64, sigma_x2: f64, sigma2: f64, gain: f64) -> Result<Self> {
        ensure_finite("h.re", h.re)?;
        ensure_finite("h.im", h.im)?;
        ensure_finite("sigma_x2", sigma_x2)?;
        ensure_finite("sigma2", sigma2)?;
        ensure_finite("gain", gain)?;
        if sigma_x2 < 0.0 {
            return Err(Error::Domain(format!("sigma_x2 must be non-negative, got {sigma_x2}")));
        }
        if sigma2 <= 0.0 {
            return Err(Error::Domain(format!("sigma2 must be positive, got {sigma2}")));
        }
        if gain <= 0.0 {
            return Err(Error::Domain(format!("gain must be positive, got {gain}")));
        }
        Ok(ChannelParams {
            h,
            sigma_x2,
            sigma2,
            gain,
        })
    }

    /// `h = 1`, `sigma^2 = 1`, `g = 1` and `sigma_x^2 = snr`.
    pub fn from_snr(snr: f64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), snr, 1.0, 1.0)
    }

    /// Per-component standard deviation of `V = h X + Z`.
    pub fn sigma_v(&self) -> f64 {
        (0.5 * (self.h.norm_sqr() * self.sigma_x2 + self.sigma2)).sqrt()
    }

    pub fn snr(&self) -> f64 {
        self.h.norm_sqr() * self.sigma_x2 / self.sigma2
    }
}

/// One channel use with given input `x` and noise `z`.
pub fn simulate_symbol(
    params: &ChannelParams,
    quantizer: &SymmetricQuantizer,
    x: Complex64,
    z: Complex64,
) -> Complex64 {
    let v = params.h * x + z;
    let scale = params.gain / params.sigma_v();
    Complex64::new(
        quantizer.quantize_finite(scale * v.re),
        quantizer.quantize_finite(scale * v.im),
    )
}

/// Circularly symmetric complex Gaussian samples by Box-Muller.
struct ComplexGaussian {
    rng: ChaCha8Rng,
}

impl ComplexGaussian {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ComplexGaussian { rng }
    }

    /// A draw from `CN(0, 1)` (unit total power).
    #[inline]
    fn next_unit(&mut self) -> Complex64 {
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        // each component has variance 1/2
        let r = (-u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }
}

/// Sample moments of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    /// Sample mean of `X Y*`.
    pub exy_conj: Complex64,
    /// Sample mean of `|Y|^2`.
    pub ey2: f64,
    pub delta_hat: f64,
    pub gmi_hat_nats: f64,
    pub n_samples: usize,
    /// Batch-means standard error of `gmi_hat_nats`.
    pub std_err_gmi: f64,
    /// `E[X* Y]/sigma_x^2` estimate.
    pub alpha_hat: Complex64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct BatchSums {
    xy_conj: Complex64,
    x2: f64,
    y2: f64,
    n: usize,
}

// Normalizing by the sample E|X|^2 keeps delta in [0, 1] by Cauchy-Schwarz.
fn delta_and_gmi(exy: Complex64, ex2: f64, ey2: f64) -> (f64, f64) {
    let delta = exy.norm_sqr() / (ex2 * ey2);
    (delta, -(-delta).ln_1p())
}

fn run_batch(
    params: &ChannelParams,
    quantizer: &SymmetricQuantizer,
    n: usize,
    seed: u64,
    stream: u64,
) -> BatchSums {
    let mut gauss = ComplexGaussian::new(seed, stream);
    let sx = params.sigma_x2.sqrt();
    let sz = params.sigma2.sqrt();
    let mut sums = BatchSums {
        n,
        ..Default::default()
    };
    for _ in 0..n {
        let x = gauss.next_unit() * sx;
        let z = gauss.next_unit() * sz;
        let y = simulate_symbol(params, quantizer, x, z);
        sums.xy_conj += x * y.conj();
        sums.x2 += x.norm_sqr();
        sums.y2 += y.norm_sqr();
    }
    sums
}

/// Estimates the moments behind the GMI from `n_samples` channel uses.
pub fn estimate_moments(
    params: &ChannelParams,
    quantizer: &SymmetricQuantizer,
    n_samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::Parameter(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if params.sigma_x2 <= 0.0 {
        return Err(Error::Parameter("moment estimation needs sigma_x2 > 0".into()));
    }

    let base = n_samples / BATCHES;
    let extra = n_samples % BATCHES;
    let batches: Vec<BatchSums> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let n = base + usize::from(b < extra);
            run_batch(params, quantizer, n, seed, b as u64)
        })
        .collect();

    let mut total = BatchSums::default();
    let mut batch_gmi = Vec::with_capacity(BATCHES);
    for b in &batches {
        total.xy_conj += b.xy_conj;
        total.x2 += b.x2;
        total.y2 += b.y2;
        total.n += b.n;
        let nf = b.n as f64;
        batch_gmi.push(delta_and_gmi(b.xy_conj / nf, b.x2 / nf, b.y2 / nf).1);
    }

    let nf = total.n as f64;
    let exy_conj = total.xy_conj / nf;
    let ey2 = total.y2 / nf;
    let (delta_hat, gmi_hat_nats) = delta_and_gmi(exy_conj, total.x2 / nf, ey2);
    if !(0.0..1.0).contains(&delta_hat) {
        return Err(Error::Parameter(format!(
            "degenerate moment estimate (delta = {delta_hat})"
        )));
    }

    let mean = batch_gmi.iter().sum::<f64>() / BATCHES as f64;
    let var = batch_gmi.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;

    Ok(MomentEstimate {
        exy_conj,
        ey2,
        delta_hat,
        gmi_hat_nats,
        n_samples: total.n,
        std_err_gmi: (var / BATCHES as f64).sqrt(),
        alpha_hat: exy_conj.conj() / params.sigma_x2,
        seed,
    })
}

/// Outcome of a nearest-neighbor decoding experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeExperiment {
    pub rate_bits: f64,
    pub block_len: usize,
    pub num_messages: usize,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub scale_a: Complex64,
    pub seed: u64,
}

/// Message count `ceil(2^(N R))`, rejected above [`MAX_MESSAGES`].
pub fn message_count(rate_bits: f64, block_len: usize) -> Result<usize> {
    ensure_finite("rate", rate_bits)?;
    if rate_bits <= 0.0 {
        return Err(Error::Parameter(format!("rate must be positive, got {rate_bits}")));
    }
    if block_len == 0 {
        return Err(Error::Parameter("block length must be positive".into()));
    }
    let m = (block_len as f64 * rate_bits).exp2().ceil();
    if m > MAX_MESSAGES as f64 {
        return Err(Error::Parameter(format!(
            "2^(N R) = 2^{:.2} messages exceeds the cap of {MAX_MESSAGES}",
            block_len as f64 * rate_bits
        )));
    }
    Ok(m as usize)
}

/// One trial: draw a fresh codebook, send message 0, decode by minimum
/// distance to `a X(m)`. Returns true on a decoding error.
fn decode_trial(
    params: &ChannelParams,
    quantizer: &SymmetricQuantizer,
    scale_a: Complex64,
    block_len: usize,
    num_messages: usize,
    seed: u64,
    trial: u64,
) -> bool {
    let mut gauss = ComplexGaussian::new(seed, trial);
    let sx = params.sigma_x2.sqrt();
    let sz = params.sigma2.sqrt();

    let sent: Vec<Complex64> = (0..block_len).map(|_| gauss.next_unit() * sx).collect();
    let received: Vec<Complex64> = sent
        .iter()
        .map(|&x| simulate_symbol(params, quantizer, x, gauss.next_unit() * sz))
        .collect();
    let d_sent: f64 = received
        .iter()
        .zip(&sent)
        .map(|(y, x)| (y - scale_a * x).norm_sqr())
        .sum();

    for _ in 1..num_messages {
        // partial distances stop as soon as the competitor is farther away
        let mut d = 0.0;
        let mut closer = true;
        for y in &received {
            let x = gauss.next_unit() * sx;
            d += (y - scale_a * x).norm_sqr();
            if d >= d_sent {
                closer = false;
                break;
            }
        }
        if closer {
            return true;
        }
    }
    false
}

/// Monte Carlo error rate of the scaled nearest-neighbor decoder with an
/// i.i.d. Gaussian codebook, using `a = alpha`.
pub fn run_decode_experiment(
    params: &ChannelParams,
    quantizer: &SymmetricQuantizer,
    rate_bits: f64,
    block_len: usize,
    trials: usize,
    seed: u64,
) -> Result<DecodeExperiment> {
    let num_messages = message_count(rate_bits, block_len)?;
    if trials < MIN_TRIALS {
        return Err(Error::Parameter(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let scale_a = decoder_scale_alpha(params, quantizer)?;

    let errors = (0..trials as u64)
        .into_par_iter()
        .filter(|&t| decode_trial(params, quantizer, scale_a, block_len, num_messages, seed, t))
        .count();

    Ok(DecodeExperiment {
        rate_bits,
        block_len,
        num_messages,
        trials,
        errors,
        error_rate: errors as f64 / trials as f64,
        scale_a,
        seed,
    })
}
