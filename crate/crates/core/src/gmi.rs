//! Exact achievable rate of the quantized complex AWGN channel under an
//! i.i.d. Gaussian codebook and scaled nearest-neighbor decoding.
//!
//! A quantizer enters the rate only through two coefficients,
//!
//! ```text
//! A = sqrt(2 pi) sum_k r_k (phi(l_{k-1}) - phi(l_k))
//! B = pi sum_k r_k^2 (Q(l_{k-1}) - Q(l_k))
//! ```
//!
//! and the nonlinearity parameter `gamma = 1 - A^2/B`, after which
//! `GMI = ln(1 + snr) - ln(1 + gamma snr)` nats per channel use.
//! All rates here are in nats.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::montecarlo::ChannelParams;
use crate::numerics::{linear_to_db, nats_to_bits, q, CompensatedSum};
use crate::quantizer::{SymmetricQuantizer, UniformSpec};

/// `exp(-t^2/2)`, i.e. `sqrt(2 pi) phi(t)`; zero at infinity.
#[inline]
fn gauss(t: f64) -> f64 {
    (-0.5 * t * t).exp()
}

/// Coefficient A for a general symmetric quantizer.
pub fn coeff_a(quantizer: &SymmetricQuantizer) -> f64 {
    quantizer
        .points()
        .iter()
        .enumerate()
        .map(|(k, &r)| r * (gauss(quantizer.cell_lower(k)) - gauss(quantizer.cell_upper(k))))
        .collect::<CompensatedSum>()
        .value()
}

/// Coefficient B for a general symmetric quantizer.
pub fn coeff_b(quantizer: &SymmetricQuantizer) -> f64 {
    let sum = quantizer
        .points()
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let upper = quantizer.cell_upper(k);
            let q_upper = if upper.is_finite() { q(upper) } else { 0.0 };
            r * r * (q(quantizer.cell_lower(k)) - q_upper)
        })
        .collect::<CompensatedSum>();
    PI * sum.value()
}

/// Coefficient A for a uniform quantizer: `sum_{k<K} l exp(-(k l)^2/2) - l/2`.
pub fn coeff_a_uniform(spec: &UniformSpec) -> f64 {
    let step = spec.step();
    let sum = (0..spec.levels())
        .map(|k| gauss(k as f64 * step))
        .collect::<CompensatedSum>();
    step * sum.value() - 0.5 * step
}

/// Coefficient B for a uniform quantizer: `pi (sum_{k<K} 2 k l^2 Q(k l) + l^2/8)`.
pub fn coeff_b_uniform(spec: &UniformSpec) -> f64 {
    let step = spec.step();
    let mut sum = (1..spec.levels())
        .map(|k| {
            let kf = k as f64;
            2.0 * kf * q(kf * step)
        })
        .collect::<CompensatedSum>();
    sum.add(0.125);
    PI * step * step * sum.value()
}

/// `B - A^2` with a single rounding of the product.
pub fn gamma_numerator(a: f64, b: f64) -> f64 {
    (-a).mul_add(a, b)
}

/// `gamma = 1 - A^2/B` evaluated as `(B - A^2)/B`.
pub fn gamma_from_coeffs(a: f64, b: f64) -> f64 {
    gamma_numerator(a, b) / b
}

/// Nonlinearity parameter of a general symmetric quantizer.
pub fn gamma(quantizer: &SymmetricQuantizer) -> f64 {
    gamma_from_coeffs(coeff_a(quantizer), coeff_b(quantizer))
}

/// Nonlinearity parameter of a uniform quantizer, via the uniform-form sums.
pub fn gamma_uniform(spec: &UniformSpec) -> f64 {
    gamma_from_coeffs(coeff_a_uniform(spec), coeff_b_uniform(spec))
}

fn check_snr(snr: f64) -> Result<()> {
    ensure_finite("snr", snr)?;
    if snr < 0.0 {
        return Err(Error::Domain(format!("snr must be non-negative, got {snr}")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    ensure_finite("gamma", gamma)?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma must lie in [0, 1), got {gamma}")));
    }
    Ok(())
}

/// Capacity of the unquantized channel, `ln(1 + snr)`.
pub fn capacity(snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(snr.ln_1p())
}

/// Achievable rate `ln(1 + snr) - ln(1 + gamma snr)` in nats per channel use.
pub fn gmi_rate(gamma: f64, snr: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_snr(snr)?;
    Ok(snr.ln_1p() - (gamma * snr).ln_1p())
}

/// The GMI's moment ratio `Delta`, with `GMI = ln(1/(1 - Delta))`.
pub fn delta(gamma: f64, snr: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_snr(snr)?;
    Ok(snr * (1.0 - gamma) / (1.0 + snr))
}

/// Rate loss relative to capacity, `ln(1 + gamma snr)`.
///
/// For small `gamma snr` this is `gamma snr - (gamma snr)^2/2 + ...`; the
/// exact logarithm is returned rather than the truncated series.
pub fn rate_loss_fine_quantization(gamma: f64, snr: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_snr(snr)?;
    Ok((gamma * snr).ln_1p())
}

/// Decoder scaling `alpha = E[X* Y]/sigma_x^2` that maximizes the GMI.
///
/// `quantizer` is the raw quantizer applied to `g V / sigma_v`; its points are
/// the raw outputs. The result has the phase of `h`.
pub fn decoder_scale_alpha(channel: &ChannelParams, quantizer: &SymmetricQuantizer) -> Result<Complex64> {
    if channel.sigma_x2 <= 0.0 {
        return Err(Error::Domain("alpha needs sigma_x^2 > 0".into()));
    }
    let normalized = SymmetricQuantizer::normalize_gain(
        quantizer.thresholds(),
        quantizer.points(),
        channel.gain,
        channel.sigma_v(),
    )?;
    // A is linear in the points, so g A(normalized) is A of (normalized cells, raw points).
    let a = channel.gain * coeff_a(&normalized);
    let received_power = channel.h.norm_sqr() * channel.sigma_x2 + channel.sigma2;
    Ok(channel.h * (2.0 * a / (PI * received_power).sqrt()))
}

/// Leading SNR asymptotes of the GMI for a given `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrAsymptotes {
    /// High-SNR saturation rate `ln(1/gamma)`, nats.
    pub saturation_nats: f64,
    /// Coefficient of `snr` as `snr -> 0`: `1 - gamma`.
    pub low_snr_slope: f64,
    /// Coefficient of `-snr^2` as `snr -> 0`: `(1 - gamma^2)/2`.
    pub low_snr_quad: f64,
    /// Coefficient of `-1/snr` as `snr -> inf`: `1/gamma - 1`.
    pub high_snr_correction: f64,
}

pub fn snr_asymptotes(gamma: f64) -> SnrAsymptotes {
    SnrAsymptotes {
        saturation_nats: -gamma.ln(),
        low_snr_slope: 1.0 - gamma,
        low_snr_quad: 0.5 * (1.0 - gamma * gamma),
        high_snr_correction: 1.0 / gamma - 1.0,
    }
}

/// Every rate quantity for one (quantizer, SNR) pair.
///
/// `alpha_scale` is evaluated for the reference channel `h = 1`, `sigma^2 = 1`,
/// `sigma_x^2 = snr`, `g = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GmiReport {
    pub levels: usize,
    /// Step and loading factor, present for uniform quantizers.
    pub uniform: Option<UniformSpec>,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub gamma: f64,
    pub snr: f64,
    pub delta: f64,
    pub alpha_scale: Complex64,
    pub gmi_nats: f64,
    pub capacity_nats: f64,
    pub rate_loss_nats: f64,
}

impl GmiReport {
    pub fn for_uniform(spec: &UniformSpec, snr: f64) -> Result<Self> {
        let a = coeff_a_uniform(spec);
        let b = coeff_b_uniform(spec);
        Self::assemble(spec.levels(), Some(*spec), a, b, snr)
    }

    pub fn for_quantizer(quantizer: &SymmetricQuantizer, snr: f64) -> Result<Self> {
        let a = coeff_a(quantizer);
        let b = coeff_b(quantizer);
        Self::assemble(quantizer.levels(), None, a, b, snr)
    }

    fn assemble(levels: usize, uniform: Option<UniformSpec>, a: f64, b: f64, snr: f64) -> Result<Self> {
        check_snr(snr)?;
        let gamma = gamma_from_coeffs(a, b);
        let capacity_nats = snr.ln_1p();
        let rate_loss_nats = (gamma * snr).ln_1p();
        Ok(GmiReport {
            levels,
            uniform,
            coeff_a: a,
            coeff_b: b,
            gamma,
            snr,
            delta: delta(gamma, snr)?,
            alpha_scale: Complex64::new(2.0 * a / (PI * (snr + 1.0)).sqrt(), 0.0),
            gmi_nats: capacity_nats - rate_loss_nats,
            capacity_nats,
            rate_loss_nats,
        })
    }
}

#[derive(Serialize)]
struct GmiReportJson {
    #[serde(rename = "K")]
    levels: usize,
    step: Option<f64>,
    loading_factor: Option<f64>,
    #[serde(rename = "A")]
    coeff_a: f64,
    #[serde(rename = "B")]
    coeff_b: f64,
    gamma: f64,
    snr_db: f64,
    gmi_bits: f64,
    capacity_bits: f64,
    loss_bits: f64,
}

impl Serialize for GmiReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GmiReportJson {
            levels: self.levels,
            step: self.uniform.map(|u| u.step()),
            loading_factor: self.uniform.map(|u| u.loading_factor()),
            coeff_a: self.coeff_a,
            coeff_b: self.coeff_b,
            gamma: self.gamma,
            snr_db: linear_to_db(self.snr),
            gmi_bits: nats_to_bits(self.gmi_nats),
            capacity_bits: nats_to_bits(self.capacity_nats),
            loss_bits: nats_to_bits(self.rate_loss_nats),
        }
        .serialize(serializer)
    }
}
