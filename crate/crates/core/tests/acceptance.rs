//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use quantrate::gmi::{
    capacity, coeff_a, coeff_a_uniform, coeff_b, coeff_b_uniform, decoder_scale_alpha, gamma,
    gamma_uniform, gmi_rate, snr_asymptotes,
};
use quantrate::highres::{
    gamma_bar, loading_estimate, optimal_loading_factor, rate_optimal_loading,
    stationarity_residual,
};
use quantrate::montecarlo::{estimate_moments, run_decode_experiment, ChannelParams};
use quantrate::numerics::{db_to_linear, nats_to_bits, Tolerance};
use quantrate::quantizer::{SymmetricQuantizer, UniformSpec};
use rayon::prelude::*;

const SEED: u64 = 0x5eed_2024;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn l_star(k: usize) -> f64 {
    optimal_loading_factor(k, &Tolerance::default()).expect("optimal loading")
}

fn gamma_at(k: usize, l: f64) -> f64 {
    gamma_uniform(&UniformSpec::from_loading(k, l).unwrap())
}

/// `|x_i - target|` nonincreasing.
fn approaches(xs: &[f64], target: f64) -> bool {
    xs.windows(2)
        .all(|w| (w[1] - target).abs() <= (w[0] - target).abs())
}

fn fmt(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn one_bit_constants() -> Outcome {
    let target = 1.0 - 2.0 / PI;
    let worst = (1..=200)
        .map(|i| {
            let q = SymmetricQuantizer::new(vec![], vec![0.01 * i as f64]).unwrap();
            (gamma(&q) - target).abs()
        })
        .fold(0.0, f64::max);
    let sat = nats_to_bits(snr_asymptotes(target).saturation_nats);
    let closed = (PI / (PI - 2.0)).log2();
    let finite = nats_to_bits(gmi_rate(target, 1e12).unwrap());
    let pass = worst < 1e-12
        && (sat - 1.4604).abs() < 5e-5
        && (sat - closed).abs() < 1e-12
        && (finite - 1.4604).abs() < 5e-5;
    outcome(
        pass,
        format!("max |gamma - (1 - 2/pi)| = {worst:.2e}, saturation = {sat:.6} bits"),
    )
}

fn form_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut k = 1;
    while k <= 4096 {
        for i in 1..=40 {
            let spec = UniformSpec::from_step(k, 0.05 * i as f64).unwrap();
            let q = spec.quantizer();
            worst = worst
                .max((coeff_a(&q) - coeff_a_uniform(&spec)).abs())
                .max((coeff_b(&q) - coeff_b_uniform(&spec)).abs());
        }
        k *= 2;
    }
    outcome(worst < 1e-12, format!("max coefficient gap = {worst:.2e}"))
}

fn granular_law() -> Outcome {
    let ratios: Vec<f64> = (6..=12)
        .into_par_iter()
        .map(|e| {
            let k = 1usize << e;
            let l = l_star(k);
            let step = l / k as f64;
            gamma_at(k, l) / (step * step / 12.0)
        })
        .collect();
    let at_1024 = ratios[4];
    let pass = (0.99..=1.01).contains(&at_1024) && approaches(&ratios, 1.0);
    outcome(
        pass,
        format!(
            "gamma/(step^2/12) at K = 2^10 is {at_1024:.4}; K = 2^6..2^12: {}",
            fmt(&ratios)
        ),
    )
}

fn overload_law() -> Outcome {
    let ratio = |l: f64| gamma_bar(l).unwrap() * l.powi(4) * (0.5 * l * l).exp() / 4.0;
    let (r6, r8) = (ratio(6.0), ratio(8.0));
    let pass = (0.8..=1.2).contains(&r6) && (r8 - 1.0).abs() < (r6 - 1.0).abs();
    outcome(pass, format!("ratio at L = 6 is {r6:.4}, at L = 8 is {r8:.4}"))
}

fn optimal_loading_asymptotics() -> Outcome {
    let ks: Vec<usize> = (6..=16).map(|e| 1usize << e).collect();
    let stars: Vec<f64> = ks.par_iter().map(|&k| l_star(k)).collect();
    let vals: Vec<f64> = ks
        .iter()
        .zip(&stars)
        .map(|(&k, &l)| {
            let k = k as f64;
            24.0 * k * k * (-0.5 * l * l).exp() / ((2.0 * PI).sqrt() * l.powi(3))
        })
        .collect();
    let scaled: Vec<f64> = ks
        .iter()
        .zip(&stars)
        .map(|(&k, &l)| l / (2.0 * (2.0 * k as f64).ln().sqrt()))
        .collect();
    let last = *vals.last().unwrap();
    let scaled_ok = scaled.windows(2).all(|w| w[1] > w[0]) && scaled.iter().all(|&s| s < 1.0);
    let pass = (0.9..=1.1).contains(&last) && approaches(&vals, 1.0) && scaled_ok;
    outcome(
        pass,
        format!(
            "K = 2^6..2^16: balance = [{}]; L*/(2 sqrt(ln 2K)) = [{}]",
            fmt(&vals),
            fmt(&scaled)
        ),
    )
}

fn loading_estimate_accuracy() -> Outcome {
    let ks: Vec<usize> = (1..=16).map(|e| 1usize << e).collect();
    let rows: Vec<(f64, f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let lh = loading_estimate(k).unwrap();
            let residual = lh * lh + 6.0 * lh.ln() - (18.0 / PI).ln() - 4.0 * (2.0 * k as f64).ln();
            (l_star(k), lh, residual)
        })
        .collect();
    let max_residual = rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
    let gaps: Vec<f64> = rows.iter().map(|r| (r.0 - r.1).abs()).collect();
    let gap_1024 = gaps[9];
    let decreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    let snr = 10.0;
    let max_gmi_gap = ks
        .iter()
        .zip(&rows)
        .filter(|(&k, _)| k >= 64)
        .map(|(&k, r)| {
            gmi_rate(gamma_at(k, r.0), snr).unwrap() - gmi_rate(gamma_at(k, r.1), snr).unwrap()
        })
        .fold(0.0, f64::max);
    let pass = max_residual < 1e-10 && gap_1024 < 0.02 && decreasing && max_gmi_gap < 1e-5;
    outcome(
        pass,
        format!(
            "residual {max_residual:.1e}; |L* - L_hat| over K = 2..2^16: [{}]; max GMI gap {max_gmi_gap:.1e} nats",
            fmt(&gaps)
        ),
    )
}

fn stationarity() -> Outcome {
    let worst = [2usize, 4, 8, 16, 64]
        .iter()
        .map(|&k| stationarity_residual(&UniformSpec::from_loading(k, l_star(k)).unwrap()).abs())
        .fold(0.0, f64::max);
    outcome(worst < 1e-6, format!("max |A/B - sqrt(2/pi)| = {worst:.2e}"))
}

fn monte_carlo() -> Outcome {
    let tol = Tolerance::default();
    let mut cells = Vec::new();
    for b in 1..=6u32 {
        let k = 1usize << (b - 1);
        for l in [rate_optimal_loading(k, &tol).unwrap(), 4.0] {
            for snr_db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
                cells.push((k, l, snr_db));
            }
        }
    }
    let results: Vec<(f64, f64, f64)> = cells
        .iter()
        .enumerate()
        .map(|(i, &(k, l, snr_db))| {
            let snr = db_to_linear(snr_db);
            let params = ChannelParams::from_snr(snr).unwrap();
            let q = UniformSpec::from_loading(k, l).unwrap().quantizer();
            let est = estimate_moments(&params, &q, 1_000_000, SEED + i as u64).unwrap();
            let analytic = gmi_rate(gamma(&q), snr).unwrap();
            let alpha: Complex64 = decoder_scale_alpha(&params, &q).unwrap();
            let z = (est.gmi_hat_nats - analytic) / est.std_err_gmi;
            let mag = (est.alpha_hat.norm() / alpha.norm() - 1.0).abs();
            let phase = (est.alpha_hat / alpha).arg().abs().to_degrees();
            (z, mag, phase)
        })
        .collect();
    let within = results.iter().filter(|r| r.0.abs() <= 4.0).count();
    let frac = within as f64 / results.len() as f64;
    let max_mag = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_phase = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let pass = frac >= 0.95 && max_mag < 0.01 && max_phase < 1.0;
    outcome(
        pass,
        format!(
            "{within}/{} cells within 4 SE; max alpha error {:.3}% / {max_phase:.3} deg",
            results.len(),
            100.0 * max_mag
        ),
    )
}

fn decoding() -> Outcome {
    let snr = db_to_linear(20.0);
    let params = ChannelParams::from_snr(snr).unwrap();
    let k = 8;
    let q = UniformSpec::from_loading(k, l_star(k)).unwrap().quantizer();
    let rate = 0.5 * nats_to_bits(gmi_rate(gamma(&q), snr).unwrap());
    let mut notes = Vec::new();
    let mut rates = Vec::new();
    for n in [32usize, 64, 128] {
        match run_decode_experiment(&params, &q, rate, n, 500, SEED) {
            Ok(e) => rates.push(e.error_rate),
            Err(e) => notes.push(format!("N = {n}: {e}")),
        }
    }
    let trend_ok = notes.is_empty() && rates.windows(2).all(|w| w[1] <= w[0]);
    let above = 2.0 * nats_to_bits(capacity(snr).unwrap());
    let high = run_decode_experiment(&params, &q, above, 1, 500, SEED);
    let high_ok = matches!(&high, Ok(e) if e.error_rate > 0.5);
    let high_note = match &high {
        Ok(e) => format!("error rate {:.3} at R = 2C, N = 1", e.error_rate),
        Err(e) => format!("R = 2C: {e}"),
    };
    outcome(
        trend_ok && high_ok,
        format!(
            "R = {rate:.3} bits: rates {rates:?} {}; {high_note}",
            notes.join("; ")
        ),
    )
}

fn four_sigma_rule() -> Outcome {
    let snr = 10.0;
    let rel = |b: u32| {
        let k = 1usize << (b - 1);
        let best = gmi_rate(gamma_at(k, l_star(k)), snr).unwrap();
        (best - gmi_rate(gamma_at(k, 4.0), snr).unwrap()) / best
    };
    let (r9, r3) = (rel(9), rel(3));
    outcome(
        r9 < 1e-3 && r3 > 1e-2,
        format!("relative loss of L = 4: b = 9 {r9:.2e}, b = 3 {r3:.4}"),
    )
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("one-bit constants", one_bit_constants),
        ("form equivalence", form_equivalence),
        ("granular law", granular_law),
        ("overload law", overload_law),
        ("optimal loading asymptotics", optimal_loading_asymptotics),
        ("loading estimate", loading_estimate_accuracy),
        ("stationarity", stationarity),
        ("monte carlo", monte_carlo),
        ("decoding", decoding),
        ("four-sigma rule", four_sigma_rule),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag} [{name}] ({:.2}s) {}",
            i + 1,
            t.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
