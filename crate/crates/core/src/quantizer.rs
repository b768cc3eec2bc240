//! Symmetric 2K-level scalar quantizers in the normalized (unit-variance) domain.
//!
//! A quantizer is stored by its positive half: thresholds `l_1 < ... < l_{K-1}`
//! (with implicit `l_0 = 0` and `l_K = inf`) and representation points
//! `r_1 < ... < r_K`. Cells are closed below, open above, and the output is
//! `r_k sgn(v)` with `sgn(0) = +1`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuantizerJson", into = "QuantizerJson")]
pub struct SymmetricQuantizer {
    thresholds: Vec<f64>,
    points: Vec<f64>,
}

/// JSON wire form `{K, thresholds[], points[]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct QuantizerJson {
    #[serde(rename = "K")]
    levels: usize,
    thresholds: Vec<f64>,
    points: Vec<f64>,
}

impl TryFrom<QuantizerJson> for SymmetricQuantizer {
    type Error = Error;

    fn try_from(json: QuantizerJson) -> Result<Self> {
        if json.levels != json.points.len() {
            return Err(Error::Quantizer(format!(
                "K = {} but {} points given",
                json.levels,
                json.points.len()
            )));
        }
        SymmetricQuantizer::new(json.thresholds, json.points)
    }
}

impl From<SymmetricQuantizer> for QuantizerJson {
    fn from(q: SymmetricQuantizer) -> Self {
        QuantizerJson {
            levels: q.levels(),
            thresholds: q.thresholds,
            points: q.points,
        }
    }
}

fn strictly_increasing_positive(name: &str, xs: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        if !x.is_finite() || x <= prev {
            return Err(Error::Quantizer(format!(
                "{name} must be finite, positive and strictly increasing (index {i}: {x})"
            )));
        }
        prev = x;
    }
    Ok(())
}

impl SymmetricQuantizer {
    /// Builds a quantizer from its positive thresholds (K-1 of them) and points (K).
    pub fn new(thresholds: Vec<f64>, points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Quantizer("at least one representation point is required".into()));
        }
        if thresholds.len() + 1 != points.len() {
            return Err(Error::Quantizer(format!(
                "{} points need {} thresholds, got {}",
                points.len(),
                points.len() - 1,
                thresholds.len()
            )));
        }
        strictly_increasing_positive("thresholds", &thresholds)?;
        strictly_increasing_positive("points", &points)?;
        Ok(SymmetricQuantizer { thresholds, points })
    }

    /// Uniform mid-rise quantizer: `l_k = k step`, `r_k = (k - 1/2) step`.
    pub fn uniform(levels: usize, step: f64) -> Result<Self> {
        UniformSpec::from_step(levels, step).map(|spec| spec.quantizer())
    }

    /// Half the number of output levels.
    pub fn levels(&self) -> usize {
        self.points.len()
    }

    /// Resolution in bits, `log2(2K)`.
    pub fn resolution_bits(&self) -> f64 {
        (2.0 * self.levels() as f64).log2()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Lower edge of cell `k` (0-based), `l_0 = 0`.
    pub fn cell_lower(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.thresholds[k - 1]
        }
    }

    /// Upper edge of cell `k` (0-based), infinite for the last cell.
    pub fn cell_upper(&self, k: usize) -> f64 {
        self.thresholds.get(k).copied().unwrap_or(f64::INFINITY)
    }

    /// Quantizes a normalized sample.
    pub fn quantize(&self, v: f64) -> Result<f64> {
        ensure_finite("v", v)?;
        Ok(self.quantize_finite(v))
    }

    #[inline]
    pub(crate) fn quantize_finite(&self, v: f64) -> f64 {
        let k = self.thresholds.partition_point(|&t| t <= v.abs());
        let r = self.points[k];
        if v < 0.0 {
            -r
        } else {
            r
        }
    }

    /// Same cells with every representation point multiplied by `c`.
    pub fn scale_points(&self, c: f64) -> Result<Self> {
        Self::new(
            self.thresholds.clone(),
            self.points.iter().map(|r| r * c).collect(),
        )
    }

    /// Equivalent quantizer for a unit-variance input: thresholds and points
    /// divided by the gain-control factor `g`.
    ///
    /// `raw_thresholds` are already expressed in units of `sigma_v`, so
    /// `sigma_v` is only validated here.
    pub fn normalize_gain(
        raw_thresholds: &[f64],
        raw_points: &[f64],
        gain: f64,
        sigma_v: f64,
    ) -> Result<Self> {
        ensure_finite("gain", gain)?;
        ensure_finite("sigma_v", sigma_v)?;
        if gain <= 0.0 {
            return Err(Error::Domain(format!("gain must be positive, got {gain}")));
        }
        if sigma_v <= 0.0 {
            return Err(Error::Domain(format!("sigma_v must be positive, got {sigma_v}")));
        }
        Self::new(
            raw_thresholds.iter().map(|l| l / gain).collect(),
            raw_points.iter().map(|y| y / gain).collect(),
        )
    }
}

/// A uniform quantizer described by its level count and step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformSpec {
    levels: usize,
    step: f64,
}

impl UniformSpec {
    pub fn from_step(levels: usize, step: f64) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain("K must be at least 1".into()));
        }
        ensure_finite("step", step)?;
        if step <= 0.0 {
            return Err(Error::Domain(format!("step must be positive, got {step}")));
        }
        Ok(UniformSpec { levels, step })
    }

    /// Step chosen so that the loading factor `K step` equals `loading`.
    pub fn from_loading(levels: usize, loading: f64) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain("K must be at least 1".into()));
        }
        ensure_finite("loading factor", loading)?;
        if loading <= 0.0 {
            return Err(Error::Domain(format!(
                "loading factor must be positive, got {loading}"
            )));
        }
        Self::from_step(levels, loading / levels as f64)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn loading_factor(&self) -> f64 {
        self.levels as f64 * self.step
    }

    pub fn quantizer(&self) -> SymmetricQuantizer {
        let step = self.step;
        SymmetricQuantizer {
            thresholds: (1..self.levels).map(|k| k as f64 * step).collect(),
            points: (1..=self.levels).map(|k| (k as f64 - 0.5) * step).collect(),
        }
    }
}

/// Uniform quantizer with `levels` positive cells and the given step.
pub fn make_uniform(levels: usize, step: f64) -> Result<SymmetricQuantizer> {
    SymmetricQuantizer::uniform(levels, step)
}
