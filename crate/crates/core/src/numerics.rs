//! Gaussian special functions, closed-form tail integrals and scalar solvers.
//!
//! Everything downstream is built from the standard normal density `phi` and
//! the Gaussian tail probability `Q`. The checked public functions reject
//! non-finite arguments; the crate-internal `phi`/`q` skip the check for use
//! inside long sums.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// 1/sqrt(2 pi).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// 1/sqrt(pi).
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Low part of 1/sqrt(2): `FRAC_1_SQRT_2 + FRAC_1_SQRT_2_LO` is 1/sqrt(2) to ~1e-33.
const FRAC_1_SQRT_2_LO: f64 = -4.833_646_656_726_457e-17;

/// Stopping rule shared by the root finder and the scalar optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        let tol = Tolerance {
            abs_tol,
            rel_tol,
            max_iter,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_abs = self.abs_tol.is_finite() && self.abs_tol >= 0.0;
        let ok_rel = self.rel_tol.is_finite() && self.rel_tol >= 0.0;
        if !ok_abs || !ok_rel {
            return Err(Error::Domain("tolerances must be finite and non-negative".into()));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::Domain("at least one tolerance must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// Absolute width accepted around a point `x`.
    pub fn width_at(&self, x: f64) -> f64 {
        self.abs_tol + self.rel_tol * x.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[inline]
pub(crate) fn phi(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Q(t) = erfc(t/sqrt 2)/2, with the rounding error of t/sqrt 2 folded back
/// in to first order so that the relative accuracy holds deep in the tail.
#[inline]
pub(crate) fn q(t: f64) -> f64 {
    let u = t * FRAC_1_SQRT_2;
    let du = t.mul_add(FRAC_1_SQRT_2, -u) + t * FRAC_1_SQRT_2_LO;
    0.5 * libm::erfc(u) - du * INV_SQRT_PI * (-u * u).exp()
}

/// Standard normal density.
pub fn std_normal_pdf(t: f64) -> Result<f64> {
    ensure_finite("t", t)?;
    Ok(phi(t))
}

/// Gaussian tail probability Q(t) = P(N(0,1) > t).
pub fn q_function(t: f64) -> Result<f64> {
    ensure_finite("t", t)?;
    Ok(q(t))
}

/// Two-sided bound `t phi(t)/(t^2+1) < Q(t) < phi(t)/t`, valid for `t > 0`.
pub fn q_bounds(t: f64) -> Result<(f64, f64)> {
    ensure_finite("t", t)?;
    if t <= 0.0 {
        return Err(Error::Domain(format!("Q bounds need t > 0, got {t}")));
    }
    let p = phi(t);
    Ok((t * p / (t * t + 1.0), p / t))
}

#[inline]
pub(crate) fn tq_tail(l: f64) -> f64 {
    0.5 * ((1.0 - l * l) * q(l) + l * phi(l))
}

#[inline]
pub(crate) fn phi_minus_tq_tail(l: f64) -> f64 {
    0.5 * ((1.0 + l * l) * q(l) - l * phi(l))
}

/// Integral of t Q(t) over [L, inf).
pub fn tail_integral_tq(l: f64) -> Result<f64> {
    ensure_finite("L", l)?;
    if l < 0.0 {
        return Err(Error::Domain(format!("L must be non-negative, got {l}")));
    }
    Ok(tq_tail(l))
}

/// Integral of phi(t) - t Q(t) over [L, inf).
pub fn tail_integral_phi_minus_tq(l: f64) -> Result<f64> {
    ensure_finite("L", l)?;
    if l < 0.0 {
        return Err(Error::Domain(format!("L must be non-negative, got {l}")));
    }
    Ok(phi_minus_tq_tail(l))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

fn check_bracket(lo: f64, hi: f64) -> Result<()> {
    ensure_finite("bracket start", lo)?;
    ensure_finite("bracket end", hi)?;
    if lo >= hi {
        return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    Ok(())
}

fn eval_finite<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Domain(format!("objective is not finite at x = {x}")))
    }
}

/// Brent's method on a sign-changing bracket `[lo, hi]`.
pub fn find_root<F>(mut f: F, (lo, hi): (f64, f64), tol: &Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    tol.validate()?;
    check_bracket(lo, hi)?;

    let (mut a, mut b) = (lo, hi);
    let mut fa = eval_finite(&mut f, a)?;
    let mut fb = eval_finite(&mut f, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 0.5 * tol.width_at(b).max(4.0 * f64::EPSILON * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut qq);
            if a == c {
                p = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                qq = -qq;
            }
            p = p.abs();
            let min1 = 3.0 * xm * qq - (tol1 * qq).abs();
            let min2 = (e * qq).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = eval_finite(&mut f, b)?;
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns the maximizer and the objective value there.
pub fn maximize_scalar<F>(mut f: F, (lo, hi): (f64, f64), tol: &Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    tol.validate()?;
    check_bracket(lo, hi)?;

    // 1/phi and 1/phi^2 for the golden ratio phi
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    const INV_PHI2: f64 = 0.381_966_011_250_105_1;

    let (mut a, mut b) = (lo, hi);
    let mut x1 = a + INV_PHI2 * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval_finite(&mut f, x1)?;
    let mut f2 = eval_finite(&mut f, x2)?;

    for _ in 0..tol.max_iter {
        if b - a <= tol.width_at(0.5 * (a + b)) {
            return Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) });
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_PHI2 * (b - a);
            f1 = eval_finite(&mut f, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval_finite(&mut f, x2)?;
        }
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
    })
}

/// Nats to bits.
#[inline]
pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}

/// Decibels to a linear power ratio.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to decibels.
#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub(crate) const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[cfg(test)]
pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
