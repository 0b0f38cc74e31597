//! Differentiation of analytic periodic functions.
//!
//! `g(z) = Σ_{k≥1} b_k z^k` restricted to the unit circle. Smoothness is the
//! Hardy-space condition `Σ R^{2k}|b_k|² ≤ C²`, an index function `R^{2t}`
//! on the eigenvalues `t = k`; the derivative norm uses `t²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::report::real;
use crate::rng::NoiseRng;
use crate::{Error, Result};

/// Taylor coefficients `b_1, …, b_K` (`b_0 = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct HardyFunction {
    coeffs: Vec<Complex64>,
}

impl HardyFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("at least one coefficient is required"));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::domain("coefficients must be finite"));
        }
        Ok(HardyFunction { coeffs })
    }

    /// `|b_k| = (ρ)^{−k}` with seeded phases, scaled to `hardy_norm(·, R) = C`.
    pub fn analytic(k_max: usize, decay: f64, r: f64, c: f64, seed: u64) -> Result<Self> {
        if !(decay > r && r >= 1.0) {
            return Err(Error::domain(format!("need decay {decay} > R = {r} ≥ 1")));
        }
        let mut rng = NoiseRng::new(seed);
        let raw: Vec<Complex64> = (1..=k_max)
            .map(|k| Complex64::from_polar(decay.powi(-(k as i32)), std::f64::consts::TAU * rng.uniform()))
            .collect();
        let g = HardyFunction::new(raw)?;
        let scale = c / hardy_norm(&g, r)?;
        Ok(HardyFunction { coeffs: g.coeffs.iter().map(|b| b * scale).collect() })
    }

    /// `b_k` for `k = 1..=K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }
}

/// Coefficients `c_0, c_1, …` of a power series.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Ambient norm `sqrt(Σ|c_j|²)`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `sqrt(Σ R^{2k}|b_k|²)`; `+∞` when it overflows.
pub fn hardy_norm(g: &HardyFunction, r: f64) -> Result<f64> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::domain(format!("R must be at least 1, got {r}")));
    }
    let ln_r = r.ln();
    let sum: f64 = g
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, b)| b.norm_sqr() > 0.0)
        .map(|(i, b)| (2.0 * (i + 1) as f64 * ln_r + b.norm_sqr().ln()).exp())
        .sum();
    if sum.is_infinite() {
        log::warn!("Hardy norm overflows at R = {r}");
    }
    Ok(sum.sqrt())
}

/// `g'`: `c_{k−1} = k·b_k`.
pub fn differentiate(g: &HardyFunction) -> PowerSeries {
    PowerSeries {
        coeffs: g.coeffs.iter().enumerate().map(|(i, b)| b * (i + 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiffBounds {
    #[serde(with = "real")]
    pub vhs: f64,
    #[serde(with = "real")]
    pub ohs: f64,
}

/// `vhs = 2ε|ln(C/ε)|/ln R` and `ohs = 2C^{1/m}ε^{1−1/m}`.
pub fn diff_bounds(c: f64, epsilon: f64, r: f64, m: f64) -> Result<DiffBounds> {
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::domain(format!("R must exceed 1, got {r}")));
    }
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::domain(format!("m must exceed 1, got {m}")));
    }
    if !(c.is_finite() && c > 0.0 && epsilon > 0.0 && epsilon < c) {
        return Err(Error::domain(format!("need 0 < ε < C, got ε = {epsilon}, C = {c}")));
    }
    Ok(bounds_unchecked(c, epsilon, r, m))
}

fn bounds_unchecked(c: f64, epsilon: f64, r: f64, m: f64) -> DiffBounds {
    DiffBounds {
        vhs: 2.0 * epsilon * (c / epsilon).ln().abs() / r.ln(),
        ohs: 2.0 * c.powf(1.0 / m) * epsilon.powf(1.0 - 1.0 / m),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    #[serde(with = "real")]
    pub epsilon: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "R", with = "real")]
    pub r: f64,
    #[serde(rename = "C", with = "real")]
    pub c: f64,
    pub k_star: usize,
    #[serde(with = "real")]
    pub empirical_error: f64,
    #[serde(with = "real")]
    pub vhs_bound: f64,
    #[serde(with = "real")]
    pub ohs_bound: f64,
}

/// Cutoff level `k* = ⌊ln(C/ε)/ln R⌋`, clamped to `[0, K]`.
pub fn cutoff_level(c: f64, epsilon: f64, r: f64, k_max: usize) -> usize {
    if epsilon == 0.0 {
        return k_max;
    }
    let level = ((c / epsilon).ln() / r.ln()).floor();
    if level <= 0.0 {
        0
    } else {
        (level as usize).min(k_max)
    }
}

/// Differentiates `g` from coefficients perturbed by seeded complex noise of
/// norm exactly `ε`, keeping modes `k ≤ k*`. The OHS bound uses `m = 2`.
pub fn diff_experiment(g: &HardyFunction, r: f64, epsilon: f64, seed: u64) -> Result<DiffReport> {
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::domain(format!("R must exceed 1, got {r}")));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::domain(format!("ε must be nonnegative, got {epsilon}")));
    }
    let c = hardy_norm(g, r)?;
    if !c.is_finite() {
        return Err(Error::Overflow("Hardy norm of the truth is infinite".into()));
    }
    let k_max = g.degree();
    let mut noisy = g.coeffs.clone();
    if epsilon > 0.0 {
        let mut rng = NoiseRng::new(seed);
        let eta: Vec<Complex64> = (0..k_max).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
        let norm = eta.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        for (b, e) in noisy.iter_mut().zip(&eta) {
            *b += e * (epsilon / norm);
        }
    }
    let k_star = cutoff_level(c, epsilon, r, k_max);
    let truth = differentiate(g);
    let err_sq: f64 = (0..k_max)
        .map(|i| {
            let k = (i + 1) as f64;
            let estimate = if i < k_star { noisy[i] * k } else { Complex64::new(0.0, 0.0) };
            (estimate - truth.coeffs[i]).norm_sqr()
        })
        .sum();
    let bounds = if epsilon == 0.0 {
        DiffBounds { vhs: 0.0, ohs: 0.0 }
    } else {
        bounds_unchecked(c, epsilon, r, 2.0)
    };
    Ok(DiffReport {
        epsilon,
        k: k_max,
        r,
        c,
        k_star,
        empirical_error: err_sq.sqrt(),
        vhs_bound: bounds.vhs,
        ohs_bound: bounds.ohs,
    })
}
