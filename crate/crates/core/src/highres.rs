//! High-resolution behavior of uniform quantizers and the choice of loading factor.
//!
//! `gamma_bar(L)` is the K -> inf limit of gamma at a fixed loading factor.
//! The optimal loading factor `L*` minimizes gamma for a given K, which
//! maximizes the GMI at every SNR simultaneously.

use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::gmi::{coeff_a_uniform, coeff_b_uniform, gamma_uniform, gmi_rate};
use crate::numerics::{
    find_root, maximize_scalar, nats_to_bits, phi, phi_minus_tq_tail, q, tq_tail, Tolerance,
    SQRT_2_OVER_PI,
};
use crate::quantizer::UniformSpec;

/// Lower end of every loading-factor search bracket.
pub const SEARCH_FLOOR: f64 = 0.5;

/// Default SNR (linear, 10 dB) at which [`LoadingAnalysis`] reports rates.
pub const DEFAULT_REFERENCE_SNR: f64 = 10.0;

/// High-resolution limit of gamma at loading factor `L`.
pub fn gamma_bar(loading: f64) -> Result<f64> {
    ensure_finite("L", loading)?;
    if loading <= 0.0 {
        return Err(Error::Domain(format!(
            "gamma_bar is singular for L <= 0, got {loading}"
        )));
    }
    let qq = q(loading);
    let num = phi_minus_tq_tail(loading) - qq * qq;
    let den = 0.25 - tq_tail(loading);
    Ok(num / den)
}

/// Leading overload-loss term `(4 e^{-L^2/2} / L^4) snr`, in nats.
///
/// Meant for the asymptotic regime `L >= 3`.
pub fn overload_loss_approx(loading: f64, snr: f64) -> f64 {
    4.0 * (-0.5 * loading * loading).exp() / loading.powi(4) * snr
}

/// Leading granular-loss term `(step^2/12) snr`, in nats.
pub fn granular_loss_approx(step: f64, snr: f64) -> f64 {
    step * step / 12.0 * snr
}

/// `A/B - sqrt(2/pi)`; vanishes where gamma is stationary in the step size.
pub fn stationarity_residual(spec: &UniformSpec) -> f64 {
    coeff_a_uniform(spec) / coeff_b_uniform(spec) - SQRT_2_OVER_PI
}

/// `2 sqrt(ln 2K)`.
pub fn scaling_law(levels: usize) -> f64 {
    2.0 * (2.0 * levels as f64).ln().sqrt()
}

fn search_bracket(levels: usize) -> (f64, f64) {
    (SEARCH_FLOOR, scaling_law(levels) + 3.0)
}

fn require_multilevel(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(Error::Domain(format!(
            "loading-factor optimization needs K >= 2, got {levels}"
        )));
    }
    Ok(())
}

fn gamma_at(levels: usize, loading: f64) -> f64 {
    // levels >= 1 and loading > 0 are guaranteed by callers
    gamma_uniform(&UniformSpec::from_loading(levels, loading).expect("valid uniform spec"))
}

fn residual_at(levels: usize, loading: f64) -> f64 {
    stationarity_residual(&UniformSpec::from_loading(levels, loading).expect("valid uniform spec"))
}

/// Golden-section minimizer of gamma over the loading factor.
pub fn minimize_gamma(levels: usize, tol: &Tolerance) -> Result<f64> {
    require_multilevel(levels)?;
    let (x, _) = maximize_scalar(|l| -gamma_at(levels, l), search_bracket(levels), tol)?;
    Ok(x)
}

/// Root of the stationarity residual nearest to `guess`.
///
/// The bracket grows geometrically from `guess` until the residual changes sign.
pub fn stationary_loading(levels: usize, guess: f64, tol: &Tolerance) -> Result<f64> {
    require_multilevel(levels)?;
    let (floor, ceil) = search_bracket(levels);
    let mut half = 1e-4 * guess.max(1.0);
    while half < ceil - floor {
        let lo = (guess - half).max(floor);
        let hi = (guess + half).min(ceil);
        let (rlo, rhi) = (residual_at(levels, lo), residual_at(levels, hi));
        if rlo.signum() != rhi.signum() {
            return find_root(|l| residual_at(levels, l), (lo, hi), tol);
        }
        half *= 4.0;
    }
    Err(Error::Bracket {
        lo: floor,
        hi: ceil,
        f_lo: residual_at(levels, floor),
        f_hi: residual_at(levels, ceil),
    })
}

/// Loading factor that maximizes the GMI for a 2K-level uniform quantizer.
///
/// Golden-section search on gamma locates the optimum; the stationarity
/// root next to it then fixes the digits that gamma's flat minimum cannot
/// resolve at large K.
pub fn optimal_loading_factor(levels: usize, tol: &Tolerance) -> Result<f64> {
    let coarse = minimize_gamma(levels, tol)?;
    match stationary_loading(levels, coarse, tol) {
        Ok(refined) if (refined - coarse).abs() < 0.05 * coarse => Ok(refined),
        _ => Ok(coarse),
    }
}

/// [`optimal_loading_factor`] extended to one-bit quantizers.
///
/// Every step size gives the same gamma when K = 1; the returned
/// `2 sqrt(2/pi)` is the one where the stationarity residual vanishes.
pub fn rate_optimal_loading(levels: usize, tol: &Tolerance) -> Result<f64> {
    match levels {
        0 => Err(Error::Domain("K must be at least 1".into())),
        1 => Ok(2.0 * SQRT_2_OVER_PI),
        k => optimal_loading_factor(k, tol),
    }
}

/// Solution of `L^2 + 6 ln L - ln(18/pi) = 4 ln(2K)`.
pub fn loading_estimate(levels: usize) -> Result<f64> {
    require_multilevel(levels)?;
    let rhs = 4.0 * (2.0 * levels as f64).ln();
    let c = (18.0 / std::f64::consts::PI).ln();
    let tol = Tolerance::new(1e-15, 1e-15, 200)?;
    find_root(|l| l * l + 6.0 * l.ln() - c - rhs, search_bracket(levels), &tol)
}

/// Mean squared error of a uniform quantizer for a unit-variance Gaussian input.
///
/// Per cell `[a, b)` with point `r`:
/// `int (t - r)^2 phi = (1 + r^2)(Q(a) - Q(b)) + a phi(a) - b phi(b) - 2 r (phi(a) - phi(b))`.
pub fn mse_uniform(spec: &UniformSpec) -> f64 {
    let step = spec.step();
    let levels = spec.levels();
    let mut sum = crate::numerics::CompensatedSum::default();
    for k in 0..levels {
        let a = k as f64 * step;
        let r = (k as f64 + 0.5) * step;
        let (qb, pb, bpb) = if k + 1 == levels {
            (0.0, 0.0, 0.0)
        } else {
            let b = a + step;
            (q(b), phi(b), b * phi(b))
        };
        let (qa, pa) = (q(a), phi(a));
        sum.add((1.0 + r * r) * (qa - qb) + a * pa - bpb - 2.0 * r * (pa - pb));
    }
    2.0 * sum.value()
}

/// Loading factor minimizing [`mse_uniform`], by golden-section search.
pub fn mse_optimal_loading(levels: usize, tol: &Tolerance) -> Result<f64> {
    require_multilevel(levels)?;
    let (x, _) = maximize_scalar(
        |l| {
            -mse_uniform(&UniformSpec::from_loading(levels, l).expect("valid uniform spec"))
        },
        search_bracket(levels),
        tol,
    )?;
    Ok(x)
}

/// Optimal, estimated, asymptotic and MSE-optimal loading factors for one K.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingAnalysis {
    pub levels: usize,
    pub l_star: f64,
    pub step_star: f64,
    pub l_hat: f64,
    pub scaling_law: f64,
    pub gamma_at_star: f64,
    pub gamma_at_hat: f64,
    pub l_mse: f64,
    /// Linear SNR at which the GMI fields are evaluated.
    pub reference_snr: f64,
    pub gmi_at_star: f64,
    pub gmi_at_hat: f64,
}

impl LoadingAnalysis {
    /// Same analysis with the GMI fields re-evaluated at `snr`.
    pub fn at_snr(&self, snr: f64) -> Result<Self> {
        Ok(LoadingAnalysis {
            reference_snr: snr,
            gmi_at_star: gmi_rate(self.gamma_at_star, snr)?,
            gmi_at_hat: gmi_rate(self.gamma_at_hat, snr)?,
            ..self.clone()
        })
    }

    pub fn resolution_bits(&self) -> f64 {
        (2.0 * self.levels as f64).log2()
    }
}

/// Full loading-factor analysis at [`DEFAULT_REFERENCE_SNR`].
pub fn optimal_loading(levels: usize, tol: &Tolerance) -> Result<LoadingAnalysis> {
    require_multilevel(levels)?;
    let l_star = optimal_loading_factor(levels, tol)?;
    let l_hat = loading_estimate(levels)?;
    let gamma_at_star = gamma_at(levels, l_star);
    let gamma_at_hat = gamma_at(levels, l_hat);
    let snr = DEFAULT_REFERENCE_SNR;
    Ok(LoadingAnalysis {
        levels,
        l_star,
        step_star: l_star / levels as f64,
        l_hat,
        scaling_law: scaling_law(levels),
        gamma_at_star,
        gamma_at_hat,
        l_mse: mse_optimal_loading(levels, tol)?,
        reference_snr: snr,
        gmi_at_star: gmi_rate(gamma_at_star, snr)?,
        gmi_at_hat: gmi_rate(gamma_at_hat, snr)?,
    })
}

#[derive(Serialize)]
struct LoadingAnalysisJson {
    #[serde(rename = "K")]
    levels: usize,
    b: f64,
    #[serde(rename = "L_star")]
    l_star: f64,
    step_star: f64,
    #[serde(rename = "L_hat")]
    l_hat: f64,
    scaling_law: f64,
    #[serde(rename = "L_mse")]
    l_mse: f64,
    gamma_at_star: f64,
    gmi_at_star_bits: f64,
    gmi_at_hat_bits: f64,
}

impl Serialize for LoadingAnalysis {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LoadingAnalysisJson {
            levels: self.levels,
            b: self.resolution_bits(),
            l_star: self.l_star,
            step_star: self.step_star,
            l_hat: self.l_hat,
            scaling_law: self.scaling_law,
            l_mse: self.l_mse,
            gamma_at_star: self.gamma_at_star,
            gmi_at_star_bits: nats_to_bits(self.gmi_at_star),
            gmi_at_hat_bits: nats_to_bits(self.gmi_at_hat),
        }
        .serialize(serializer)
    }
}
