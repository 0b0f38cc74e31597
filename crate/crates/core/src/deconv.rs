//! Peak sharpening by partial deconvolution.
//!
//! Measured data `g = B_γ * f` are broadened by a dilated unit-area peak
//! `B_γ(x) = B(x/γ)/γ`. Instead of recovering `f` we solve
//! `B_{γ,β} * z = g` for the sharpened `z = B_β * f`, where the factored
//! kernel has symbol `B̂(γω)/B̂(βω)`. The regularization parameter is fixed
//! by the discrepancy principle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::index_fn::{from_peak, log_grid, IndexFunction};
use crate::report::{real, real_opt};
use crate::rng::NoiseRng;
use crate::scales::dhs_norm;
use crate::spectral::{dft_forward, dft_inverse, GridSignal, Spectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeakModel {
    /// `B̂(ω) = exp(−ω²/2)`
    Gaussian,
    /// `B̂(ω) = 1/(1+ω²)`
    Exponential,
    /// `B̂(ω) = exp(−|ω|)`
    Rational,
}

impl PeakModel {
    pub const ALL: [PeakModel; 3] = [PeakModel::Gaussian, PeakModel::Exponential, PeakModel::Rational];

    pub fn name(self) -> &'static str {
        match self {
            PeakModel::Gaussian => "gaussian",
            PeakModel::Exponential => "exponential",
            PeakModel::Rational => "rational",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// `B̂(ω)`.
    pub fn hat(self, omega: f64) -> f64 {
        match self {
            PeakModel::Gaussian => (-0.5 * omega * omega).exp(),
            PeakModel::Exponential => 1.0 / (1.0 + omega * omega),
            PeakModel::Rational => (-omega.abs()).exp(),
        }
    }

    /// `ln B̂(ω)`.
    pub fn ln_hat(self, omega: f64) -> f64 {
        match self {
            PeakModel::Gaussian => -0.5 * omega * omega,
            PeakModel::Exponential => -(omega * omega).ln_1p(),
            PeakModel::Rational => -omega.abs(),
        }
    }
}

fn check_width(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// `B̂(γω)`.
pub fn peak_hat(model: PeakModel, gamma: f64, omega: f64) -> Result<f64> {
    check_width("gamma", gamma)?;
    Ok(model.hat(gamma * omega))
}

fn kernel(model: PeakModel, gamma: f64, beta: f64, omega: f64) -> f64 {
    let w2 = omega * omega;
    match model {
        PeakModel::Gaussian => (-0.5 * (gamma * gamma - beta * beta) * w2).exp(),
        PeakModel::Exponential => (1.0 + beta * beta * w2) / (1.0 + gamma * gamma * w2),
        PeakModel::Rational => (-(gamma - beta) * omega.abs()).exp(),
    }
}

/// `B̂(γω)/B̂(βω)`, the symbol of `B_{γ,β}`.
pub fn factored_kernel_hat(model: PeakModel, gamma: f64, beta: f64, omega: f64) -> Result<f64> {
    check_width("gamma", gamma)?;
    check_width("beta", beta)?;
    if beta >= gamma {
        return Err(Error::domain(format!("the factored kernel needs β < γ, got β = {beta}, γ = {gamma}")));
    }
    Ok(kernel(model, gamma, beta, omega))
}

/// Multiplies a spectrum by `B̂(γω)`.
pub fn convolve_spectrum(model: PeakModel, gamma: f64, spec: &Spectrum) -> Result<Spectrum> {
    check_width("gamma", gamma)?;
    Ok(spec.map(|w, c| c * model.hat(gamma * w)))
}

/// `B_γ * f`, computed on the Fourier side.
pub fn convolve(model: PeakModel, gamma: f64, f: &GridSignal) -> Result<GridSignal> {
    dft_inverse(&convolve_spectrum(model, gamma, &dft_forward(f))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaConvention {
    /// Derived from the multiplicativity condition in `λ = ω²`.
    LambdaDomain,
    /// The relation in `β/γ` as literally printed.
    #[serde(rename = "paper")]
    PaperPrinted,
}

/// Interpolation exponent `σ` for a sharpening split `β ≤ γ`.
///
/// `LambdaDomain`: `σ = 1 − (β/γ)²` for Gaussian and exponential peaks,
/// `σ = (1 − β/γ)²` for rational ones. `PaperPrinted` uses `β/γ` in place
/// of `(β/γ)²`: `σ = 1 − β/γ`, resp. `σ = (1 − √(β/γ))²`.
pub fn sigma_of_beta(model: PeakModel, beta: f64, gamma: f64, convention: SigmaConvention) -> Result<f64> {
    check_width("gamma", gamma)?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    if beta > gamma {
        return Err(Error::domain(format!("β = {beta} exceeds γ = {gamma}")));
    }
    let ratio = beta / gamma;
    let tau = match convention {
        SigmaConvention::LambdaDomain => ratio * ratio,
        SigmaConvention::PaperPrinted => ratio,
    };
    Ok(match model {
        PeakModel::Gaussian | PeakModel::Exponential => 1.0 - tau,
        PeakModel::Rational => (1.0 - tau.sqrt()).powi(2),
    })
}

/// Family-specific bound on `‖e‖` from `‖r‖` and `‖r‖_s`.
///
/// Gaussian: `‖r‖_s^σ ‖r‖^{1−σ}`; exponential: `σ‖r‖_s + (1−σ)‖r‖`;
/// rational: `‖r‖_s^{√σ} ‖r‖^{1−√σ}`.
pub fn error_bound(model: PeakModel, sigma: f64, r_norm: f64, r_s_norm: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::domain(format!("σ must lie in [0, 1], got {sigma}")));
    }
    if !(r_norm >= 0.0 && r_s_norm >= 0.0) || r_norm.is_infinite() {
        return Err(Error::domain("residual norms must be nonnegative and ‖r‖ finite"));
    }
    if r_norm > r_s_norm * (1.0 + 1e-9) {
        return Err(Error::domain(format!("inconsistent norms: ‖r‖ = {r_norm} exceeds ‖r‖_s = {r_s_norm}")));
    }
    if r_norm == 0.0 {
        return Ok(0.0);
    }
    let geometric = |w: f64| {
        if w == 0.0 {
            r_norm
        } else {
            (w * r_s_norm.ln() + (1.0 - w) * r_norm.ln()).exp()
        }
    };
    Ok(match model {
        PeakModel::Gaussian => geometric(sigma),
        PeakModel::Exponential => {
            if sigma == 0.0 {
                r_norm
            } else {
                sigma * r_s_norm + (1.0 - sigma) * r_norm
            }
        }
        PeakModel::Rational => geometric(sigma.sqrt()),
    })
}

/// `2ε √(φ(ψ⁻¹(C²/ε²)))`.
///
/// Requires `φ/ψ` to decay: it must be nonincreasing on `[1, 10⁶]` and drop
/// by at least three orders of magnitude there.
pub fn apriori_bound(phi: &IndexFunction, psi: &IndexFunction, c: f64, epsilon: f64) -> Result<f64> {
    check_width("C", c)?;
    check_width("epsilon", epsilon)?;
    let ln_ratio: Vec<f64> = log_grid(1.0, 1e6, 64)
        .into_iter()
        .map(|t| Ok(phi.ln_eval(t)? - psi.ln_eval(t)?))
        .collect::<Result<_>>()?;
    let decreasing = ln_ratio.windows(2).all(|p| p[1] <= p[0] + 1e-12);
    if !decreasing || ln_ratio[ln_ratio.len() - 1] - ln_ratio[0] > 1e-3f64.ln() {
        return Err(Error::Precondition("φ/ψ does not decay on [1, 1e6]".into()));
    }
    let y = (c / epsilon).powi(2);
    let t = psi.inverse(y)?;
    Ok(2.0 * epsilon * phi.eval(t)?.sqrt())
}

/// Minimum over `ω_grid` of `|B̂(γω)|²/|B̂(γ√σ ω)|² − |B̂(βω)|²`; when it is
/// nonnegative the error is dominated by `‖r‖_{σs}`.
pub fn error_dominance_check(model: PeakModel, gamma: f64, beta: f64, sigma: f64, omega_grid: &[f64]) -> Result<DominanceReport> {
    check_width("gamma", gamma)?;
    check_width("beta", beta)?;
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::domain(format!("σ must lie in [0, 1], got {sigma}")));
    }
    let mut worst = f64::INFINITY;
    for &w in omega_grid {
        let rhs = (2.0 * (model.ln_hat(gamma * w) - model.ln_hat(gamma * sigma.sqrt() * w))).exp();
        let lhs = model.hat(beta * w).powi(2);
        worst = worst.min(rhs - lhs);
    }
    Ok(DominanceReport { ok: worst >= -1e-12, min_margin: worst })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceReport {
    pub ok: bool,
    #[serde(with = "real")]
    pub min_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SharpenMethod {
    /// `ẑ = k̂ĝ_ε/(k̂² + μ)`
    TikhonovDiscrepancy,
    /// `ẑ = ĝ_ε/k̂` below a frequency cutoff, 0 above.
    SpectralCutoff,
    /// `ẑ = k̂ĝ_ε/(k̂² + μθ(ω²))`; minimizes `‖z‖_θ` under the discrepancy constraint.
    GeneralizedMorozov { theta: IndexFunction },
}

impl SharpenMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SharpenMethod::TikhonovDiscrepancy => "tikhonov",
            SharpenMethod::SpectralCutoff => "cutoff",
            SharpenMethod::GeneralizedMorozov { .. } => "morozov",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpenConfig {
    pub model: PeakModel,
    pub gamma: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub method: SharpenMethod,
    pub sigma_convention: SigmaConvention,
}

impl SharpenConfig {
    pub fn new(model: PeakModel, gamma: f64, beta: f64, epsilon: f64) -> Self {
        SharpenConfig {
            model,
            gamma,
            beta,
            epsilon,
            method: SharpenMethod::TikhonovDiscrepancy,
            sigma_convention: SigmaConvention::LambdaDomain,
        }
    }

    pub fn with_method(mut self, method: SharpenMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_width("gamma", self.gamma)?;
        check_width("beta", self.beta)?;
        check_width("epsilon", self.epsilon)?;
        if self.beta >= self.gamma {
            return Err(Error::domain(format!("beta = {} must be below gamma = {}", self.beta, self.gamma)));
        }
        Ok(())
    }

    fn kernel(&self, omega: f64) -> f64 {
        kernel(self.model, self.gamma, self.beta, omega)
    }
}

/// Outcome of a sharpening run.
///
/// Without a known truth, `residual_norm` and `residual_s_norm` are upper
/// bounds (`residuals_measured = false`): `‖r‖ ≤ D + ε` and
/// `‖r‖_s ≤ 2·max(‖g_ε‖_s + ε·sup √a, ‖k*z_ε‖_s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpenReport {
    #[serde(skip)]
    pub z_eps: GridSignal,
    pub model: PeakModel,
    pub method: &'static str,
    pub sigma_convention: SigmaConvention,
    #[serde(with = "real")]
    pub gamma: f64,
    #[serde(with = "real")]
    pub beta: f64,
    #[serde(with = "real")]
    pub epsilon: f64,
    #[serde(with = "real")]
    pub sigma: f64,
    /// `μ` for the Tikhonov-type methods, the cutoff frequency for `cutoff`;
    /// `inf` in the degenerate regime.
    #[serde(with = "real")]
    pub reg_param: f64,
    #[serde(with = "real")]
    pub discrepancy: f64,
    /// `ε ≥ ‖g_ε‖`: the zero solution already meets the discrepancy.
    pub degenerate: bool,
    #[serde(with = "real")]
    pub residual_norm: f64,
    #[serde(with = "real")]
    pub residual_s_norm: f64,
    pub residuals_measured: bool,
    pub dominance_ok: bool,
    #[serde(with = "real")]
    pub bound: f64,
    #[serde(with = "real_opt")]
    pub empirical_error: Option<f64>,
    /// `2√(‖g‖_ψ ε)` with `ψ = (θ/k̂²)²`; only with a known truth.
    #[serde(with = "real_opt")]
    pub morozov_bound: Option<f64>,
}

fn spectrum_norm_sq(coeffs: impl Iterator<Item = f64>, scale: f64) -> f64 {
    coeffs.sum::<f64>() * scale
}

struct Solution {
    z_hat: Spectrum,
    reg_param: f64,
    discrepancy: f64,
    degenerate: bool,
}

fn tikhonov_solution(g_hat: &Spectrum, cfg: &SharpenConfig, theta: Option<&IndexFunction>) -> Result<Solution> {
    let scale = g_hat.delta_omega() / std::f64::consts::TAU;
    let kernels: Vec<f64> = g_hat.omegas().map(|w| cfg.kernel(w)).collect();
    let weights: Vec<f64> = match theta {
        Some(t) => g_hat.omegas().map(|w| t.eval(w * w)).collect::<Result<_>>()?,
        None => vec![1.0; g_hat.len()],
    };
    let power: Vec<f64> = g_hat.coeffs().iter().map(|c| c.norm_sqr()).collect();
    let g_norm = spectrum_norm_sq(power.iter().cloned(), scale).sqrt();
    let eps = cfg.epsilon;

    if eps >= g_norm {
        return Ok(Solution {
            z_hat: g_hat.map(|_, _| Complex64::new(0.0, 0.0)),
            reg_param: f64::INFINITY,
            discrepancy: g_norm,
            degenerate: true,
        });
    }

    // residual factor μθ/(k̂² + μθ) = 1/(1 + k̂²/(μθ))
    let discrepancy = |mu: f64| {
        let terms = (0..power.len()).map(|i| {
            let mt = mu * weights[i];
            let factor = if mt.is_infinite() { 1.0 } else { 1.0 / (1.0 + kernels[i] * kernels[i] / mt) };
            factor * factor * power[i]
        });
        spectrum_norm_sq(terms, scale).sqrt()
    };

    let (mut lo, mut hi) = (1e-16f64.ln(), 1e4f64.ln());
    let (d_min, d_max) = (discrepancy(lo.exp()), discrepancy(hi.exp()));
    let (bracket_lo, bracket_hi) = (0.99 * eps, 1.01 * eps);
    if d_min > bracket_hi || d_max < bracket_lo {
        return Err(Error::Bracket { lo: bracket_lo, hi: bracket_hi, min: d_min, max: d_max });
    }
    let mut mu = lo.exp();
    let mut d = d_min;
    if d_min < eps * (1.0 - 1e-10) {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let dm = discrepancy(mid.exp());
            if dm > eps {
                hi = mid;
            } else {
                lo = mid;
                mu = mid.exp();
                d = dm;
                if dm >= eps * (1.0 - 1e-10) {
                    break;
                }
            }
        }
    }
    if !(bracket_lo..=bracket_hi).contains(&d) {
        return Err(Error::Bracket { lo: bracket_lo, hi: bracket_hi, min: d_min, max: d_max });
    }
    let z_hat = Spectrum::new(
        g_hat
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mt = mu * weights[i];
                if mt.is_infinite() {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * (kernels[i] / (kernels[i] * kernels[i] + mt))
                }
            })
            .collect(),
        g_hat.len(),
        g_hat.dx(),
        g_hat.x0(),
    )?;
    Ok(Solution { z_hat, reg_param: mu, discrepancy: d, degenerate: false })
}

fn cutoff_solution(g_hat: &Spectrum, cfg: &SharpenConfig) -> Result<Solution> {
    let density = g_hat.density();
    let lambdas = density.lambdas();
    let weights = density.weights();
    let g_norm = density.total().sqrt();
    let eps = cfg.epsilon;
    if eps >= g_norm {
        return Ok(Solution {
            z_hat: g_hat.map(|_, _| Complex64::new(0.0, 0.0)),
            reg_param: 0.0,
            discrepancy: g_norm,
            degenerate: true,
        });
    }
    // discrepancy after keeping the first m λ-bins is the mass beyond them
    let mut tail = vec![0.0; lambdas.len() + 1];
    for m in (0..lambdas.len()).rev() {
        tail[m] = tail[m + 1] + weights[m];
    }
    let (bracket_lo, bracket_hi) = (0.99 * eps, 1.01 * eps);
    let keep = (0..=lambdas.len()).find(|&m| tail[m].sqrt() <= bracket_hi).unwrap_or(lambdas.len());
    let d = tail[keep].sqrt();
    if d < bracket_lo {
        return Err(Error::Bracket { lo: bracket_lo, hi: bracket_hi, min: 0.0, max: g_norm });
    }
    let cutoff = if keep == 0 { 0.0 } else { lambdas[keep - 1].sqrt() };
    let z_hat = g_hat.map(|w, c| {
        if keep > 0 && w * w <= lambdas[keep - 1] {
            c / cfg.kernel(w)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(Solution { z_hat, reg_param: cutoff, discrepancy: d, degenerate: false })
}

fn solve(g_hat: &Spectrum, cfg: &SharpenConfig) -> Result<Solution> {
    match &cfg.method {
        SharpenMethod::TikhonovDiscrepancy => tikhonov_solution(g_hat, cfg, None),
        SharpenMethod::SpectralCutoff => cutoff_solution(g_hat, cfg),
        SharpenMethod::GeneralizedMorozov { theta } => tikhonov_solution(g_hat, cfg, Some(theta)),
    }
}

fn dominance_on(spec: &Spectrum, cfg: &SharpenConfig, sigma: f64) -> Result<bool> {
    let omegas: Vec<f64> = spec.omegas().filter(|w| *w >= 0.0).collect();
    Ok(error_dominance_check(cfg.model, cfg.gamma, cfg.beta, sigma, &omegas)?.ok)
}

fn assemble(g_eps: &GridSignal, cfg: &SharpenConfig, truth: Option<&Spectrum>) -> Result<SharpenReport> {
    cfg.validate()?;
    let g_hat = dft_forward(g_eps);
    if let Some(t) = truth {
        if !t.same_grid(&g_hat) {
            return Err(Error::InvalidSignal("truth spectrum is on a different grid".into()));
        }
    }
    let sol = solve(&g_hat, cfg)?;
    let sigma = sigma_of_beta(cfg.model, cfg.beta, cfg.gamma, cfg.sigma_convention)?;
    let a = from_peak(cfg.model);
    let s = cfg.gamma * cfg.gamma;
    let fitted = sol.z_hat.map(|w, c| c * cfg.kernel(w));

    let (residual_norm, residual_s_norm, measured, empirical, morozov) = match truth {
        Some(f_hat) => {
            let g_true = convolve_spectrum(cfg.model, cfg.gamma, f_hat)?;
            let r_hat = fitted.zip_with(&g_true, |_, a, b| a - b)?;
            let r_density = r_hat.density();
            let z_true = convolve_spectrum(cfg.model, cfg.beta, f_hat)?;
            let e_hat = sol.z_hat.zip_with(&z_true, |_, a, b| a - b)?;
            let morozov = morozov_bound(&g_true, cfg)?;
            (
                r_density.total().sqrt(),
                dhs_norm(&r_density, &a, s)?,
                true,
                Some(e_hat.l2_norm()),
                morozov,
            )
        }
        None => {
            let sup_sqrt_a = g_hat
                .omegas()
                .map(|w| (0.5 * a.ln_eval(s * w * w).unwrap_or(f64::INFINITY)).exp())
                .fold(0.0, f64::max);
            let c = (dhs_norm(&g_hat.density(), &a, s)? + cfg.epsilon * sup_sqrt_a)
                .max(dhs_norm(&fitted.density(), &a, s)?);
            (sol.discrepancy + cfg.epsilon, 2.0 * c, false, None, None)
        }
    };
    let bound = error_bound(cfg.model, sigma, residual_norm, residual_s_norm.max(residual_norm))?;

    Ok(SharpenReport {
        z_eps: dft_inverse(&sol.z_hat)?,
        model: cfg.model,
        method: cfg.method.name(),
        sigma_convention: cfg.sigma_convention,
        gamma: cfg.gamma,
        beta: cfg.beta,
        epsilon: cfg.epsilon,
        sigma,
        reg_param: sol.reg_param,
        discrepancy: sol.discrepancy,
        degenerate: sol.degenerate,
        residual_norm,
        residual_s_norm,
        residuals_measured: measured,
        dominance_ok: dominance_on(&g_hat, cfg, sigma)?,
        bound,
        empirical_error: empirical,
        morozov_bound: morozov,
    })
}

/// `2√(‖g‖_ψ ε)` with `ψ = (θ/k̂²)²`, for `θ ≥ 1` (θ ≡ 1 for plain Tikhonov).
fn morozov_bound(g_true: &Spectrum, cfg: &SharpenConfig) -> Result<Option<f64>> {
    let theta = match &cfg.method {
        SharpenMethod::TikhonovDiscrepancy => IndexFunction::One,
        SharpenMethod::GeneralizedMorozov { theta } => theta.clone(),
        SharpenMethod::SpectralCutoff => return Ok(None),
    };
    let scale = g_true.delta_omega() / std::f64::consts::TAU;
    let mut sum = 0.0;
    for (w, c) in g_true.omegas().zip(g_true.coeffs()) {
        let p = c.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let ln_theta = theta.ln_eval(w * w)?;
        if ln_theta < 0.0 {
            return Ok(None);
        }
        sum += (2.0 * ln_theta - 4.0 * cfg.kernel(w).ln() + p.ln()).exp();
    }
    Ok(Some(2.0 * ((sum * scale).sqrt() * cfg.epsilon).sqrt()))
}

/// Sharpens `g_ε`; residual norms are bounded, not measured.
pub fn sharpen(g_eps: &GridSignal, cfg: &SharpenConfig) -> Result<SharpenReport> {
    assemble(g_eps, cfg, None)
}

/// Sharpens `g_ε` and measures the residual and the error against the
/// exact spectrum `f̂` of the unbroadened signal.
pub fn sharpen_with_truth(g_eps: &GridSignal, cfg: &SharpenConfig, f_hat: &Spectrum) -> Result<SharpenReport> {
    assemble(g_eps, cfg, Some(f_hat))
}

/// Generalized Morozov sharpening; `cfg.method` must carry `θ`.
pub fn morozov_sharpen(g_eps: &GridSignal, cfg: &SharpenConfig, f_hat: Option<&Spectrum>) -> Result<SharpenReport> {
    if !matches!(cfg.method, SharpenMethod::GeneralizedMorozov { .. }) {
        return Err(Error::Config("method: generalized Morozov sharpening needs a θ weight".into()));
    }
    assemble(g_eps, cfg, f_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub dx: f64,
    pub x0: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n: 4096, dx: 0.01, x0: -20.48 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center: f64,
    pub amplitude: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub f: GridSignal,
    pub g: GridSignal,
    pub g_eps: GridSignal,
    /// Exact spectrum of `f`.
    pub f_hat: Spectrum,
}

const LEAKAGE: f64 = 1e-8;

/// Synthetic spectrum: Gaussian peaks `f`, broadened data `g = B_γ * f`
/// and `g_ε = g + η` with seeded white noise scaled to `‖η‖ = ε` exactly.
///
/// `f` is built from its exact transform
/// `f̂(ω) = Σ A·exp(−iωc − w²ω²/2)`, so it is bandlimited on the grid to
/// within floating-point underflow.
pub fn synth_spectrum(peaks: &[Peak], model: PeakModel, gamma: f64, epsilon: f64, seed: u64, grid: Grid) -> Result<SynthData> {
    check_width("gamma", gamma)?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::domain(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let x1 = grid.x0 + grid.n as f64 * grid.dx;
    let reach = (2.0 * (0.5 / LEAKAGE).ln()).sqrt();
    for (i, p) in peaks.iter().enumerate() {
        check_width("width", p.width)?;
        if !(p.center.is_finite() && p.amplitude.is_finite()) {
            return Err(Error::domain(format!("peak {i} has non-finite parameters")));
        }
        let margin = (p.center - grid.x0).min(x1 - p.center);
        if margin < p.width * reach {
            return Err(Error::domain(format!("peak {i} at {} leaks more than {LEAKAGE:e} of its mass past the window", p.center)));
        }
        let nyquist = std::f64::consts::PI / grid.dx;
        if (-0.5 * (p.width * nyquist).powi(2)).exp() > LEAKAGE {
            return Err(Error::domain(format!("peak {i} of width {} is not resolved by dx = {}", p.width, grid.dx)));
        }
    }
    let f_hat = Spectrum::from_fn(grid.n, grid.dx, grid.x0, |w| {
        peaks
            .iter()
            .map(|p| Complex64::from_polar(p.amplitude * (-0.5 * (p.width * w).powi(2)).exp(), -w * p.center))
            .sum()
    })?;
    let f = dft_inverse(&f_hat)?;
    let g = dft_inverse(&convolve_spectrum(model, gamma, &f_hat)?)?;
    let g_eps = if epsilon == 0.0 {
        g.clone()
    } else {
        let mut rng = NoiseRng::new(seed);
        let raw = GridSignal::new(rng.normals(grid.n), grid.dx, grid.x0)?;
        let eta = raw.combine(epsilon / raw.l2_norm(), &g, 0.0)?;
        g.combine(1.0, &eta, 1.0)?
    };
    Ok(SynthData { f, g, g_eps, f_hat })
}

/// `‖B_γ * f‖_{γ²} − ‖f‖` in the scale generated by the matching `a`.
pub fn source_check(f: &GridSignal, model: PeakModel, gamma: f64) -> Result<f64> {
    let g_hat = convolve_spectrum(model, gamma, &dft_forward(f))?;
    Ok(dhs_norm(&g_hat.density(), &from_peak(model), gamma * gamma)? - f.l2_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::vhs_norm;

    const ACCEPT_GRID: Grid = Grid { n: 1024, dx: 0.05, x0: -25.6 };

    fn two_peaks() -> Vec<Peak> {
        vec![
            Peak { center: -1.0, amplitude: 1.0, width: 1.0 },
            Peak { center: 1.5, amplitude: 0.7, width: 1.0 },
        ]
    }

    #[test]
    fn peak_hat_values() {
        assert_eq!(peak_hat(PeakModel::Gaussian, 1.0, 0.0).unwrap(), 1.0);
        assert!((peak_hat(PeakModel::Exponential, 2.0, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((peak_hat(PeakModel::Rational, 1.0, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(peak_hat(PeakModel::Gaussian, 0.0, 1.0).is_err());
    }

    #[test]
    fn factored_kernel_values() {
        for &w in &[0.0, 0.3, 1.0, 2.5] {
            let k = factored_kernel_hat(PeakModel::Gaussian, 1.0, 0.6, w).unwrap();
            assert!((k - (-0.32 * w * w).exp()).abs() < 1e-15);
        }
        assert!((factored_kernel_hat(PeakModel::Exponential, 1.0, 0.5, 2.0).unwrap() - 0.4).abs() < 1e-15);
        for m in PeakModel::ALL {
            assert_eq!(factored_kernel_hat(m, 1.0, 0.5, 0.0).unwrap(), 1.0);
            assert!(factored_kernel_hat(m, 1.0, 1.0, 0.5).is_err());
        }
    }

    #[test]
    fn kernel_factorization_is_consistent() {
        for m in PeakModel::ALL {
            for i in 0..200 {
                let w = -10.0 + 0.1 * i as f64;
                let lhs = peak_hat(m, 1.3, w).unwrap();
                let rhs = factored_kernel_hat(m, 1.3, 0.4, w).unwrap() * peak_hat(m, 0.4, w).unwrap();
                assert!((lhs - rhs).abs() <= 1e-13 * lhs.max(1e-300));
            }
        }
    }

    #[test]
    fn convolving_a_constant_keeps_it() {
        let f = GridSignal::from_fn(256, 0.1, 0.0, |_| 3.0).unwrap();
        for m in PeakModel::ALL {
            let g = convolve(m, 0.7, &f).unwrap();
            assert!(g.samples().iter().all(|v| (v - 3.0).abs() < 1e-12));
        }
    }

    #[test]
    fn gaussian_semigroup() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).unwrap();
        let twice = convolve(PeakModel::Gaussian, 0.6, &convolve(PeakModel::Gaussian, 0.8, &data.f).unwrap()).unwrap();
        let once = convolve(PeakModel::Gaussian, 1.0, &data.f).unwrap();
        let diff = twice.sub(&once).unwrap();
        assert!(diff.samples().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn narrow_kernel_is_near_identity() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).unwrap();
        for m in PeakModel::ALL {
            let g = convolve(m, 1e-3, &data.f).unwrap();
            assert!(g.sub(&data.f).unwrap().l2_norm() <= 1e-3 * data.f.l2_norm());
        }
    }

    #[test]
    fn sigma_conventions() {
        for conv in [SigmaConvention::LambdaDomain, SigmaConvention::PaperPrinted] {
            assert_eq!(sigma_of_beta(PeakModel::Gaussian, 1.0, 1.0, conv).unwrap(), 0.0);
        }
        assert_eq!(sigma_of_beta(PeakModel::Gaussian, 0.5, 1.0, SigmaConvention::PaperPrinted).unwrap(), 0.5);
        assert!((sigma_of_beta(PeakModel::Rational, 0.25, 1.0, SigmaConvention::PaperPrinted).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(sigma_of_beta(PeakModel::Gaussian, 0.5, 1.0, SigmaConvention::LambdaDomain).unwrap(), 0.75);
        assert_eq!(sigma_of_beta(PeakModel::Rational, 0.5, 1.0, SigmaConvention::LambdaDomain).unwrap(), 0.25);
        assert!(sigma_of_beta(PeakModel::Gaussian, 1.5, 1.0, SigmaConvention::LambdaDomain).is_err());
    }

    #[test]
    fn error_bound_values() {
        assert!((error_bound(PeakModel::Gaussian, 0.5, 0.01, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((error_bound(PeakModel::Exponential, 0.5, 0.1, 1.0).unwrap() - 0.55).abs() < 1e-15);
        for m in PeakModel::ALL {
            assert_eq!(error_bound(m, 0.0, 0.3, 5.0).unwrap(), 0.3);
            assert_eq!(error_bound(m, 0.0, 0.3, f64::INFINITY).unwrap(), 0.3);
        }
        assert!(error_bound(PeakModel::Gaussian, 0.5, 2.0, 1.0).is_err());
    }

    #[test]
    fn error_bound_is_monotone_in_sigma() {
        for m in PeakModel::ALL {
            let vals: Vec<f64> = (0..=20).map(|i| error_bound(m, i as f64 / 20.0, 0.01, 3.0).unwrap()).collect();
            assert!(vals.windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn apriori_bounds() {
        let t = IndexFunction::PowerLaw { p: 1.0 };
        let v = apriori_bound(&t, &IndexFunction::Exp, 1.0, 1e-2).unwrap();
        assert!((v - 0.06070).abs() < 1e-5);
        assert!((v - 2e-2 * (2.0 * 100f64.ln()).sqrt()).abs() <= 1e-12 * v);
        let v = apriori_bound(&t, &IndexFunction::PowerLaw { p: 2.0 }, 1.0, 1e-4).unwrap();
        assert!((v - 2.0 * 1e-2).abs() <= 1e-12 * v);
        // ε = C
        let v = apriori_bound(&t, &IndexFunction::PowerLaw { p: 2.0 }, 0.5, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(apriori_bound(&IndexFunction::Exp, &t, 1.0, 1e-2).is_err());
    }

    #[test]
    fn dominance_cases() {
        let grid: Vec<f64> = (0..=500).map(|i| i as f64 * 0.1).collect();
        let sigma = sigma_of_beta(PeakModel::Gaussian, 0.5, 1.0, SigmaConvention::LambdaDomain).unwrap();
        let r = error_dominance_check(PeakModel::Gaussian, 1.0, 0.5, sigma, &grid).unwrap();
        assert!(r.ok && r.min_margin.abs() < 1e-15);
        let r = error_dominance_check(PeakModel::Gaussian, 1.0, 0.5, sigma + 0.1, &grid).unwrap();
        assert!(r.ok);
        let sigma = sigma_of_beta(PeakModel::Exponential, 0.5, 1.0, SigmaConvention::LambdaDomain).unwrap();
        assert!(error_dominance_check(PeakModel::Exponential, 1.0, 0.5, sigma, &grid).unwrap().ok);
        let sigma = sigma_of_beta(PeakModel::Gaussian, 0.5, 1.0, SigmaConvention::PaperPrinted).unwrap();
        assert!(!error_dominance_check(PeakModel::Gaussian, 1.0, 0.5, sigma, &grid).unwrap().ok);
    }

    #[test]
    fn synth_is_exact_and_deterministic() {
        let a = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 1e-3, 42, ACCEPT_GRID).unwrap();
        let b = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 1e-3, 42, ACCEPT_GRID).unwrap();
        assert_eq!(a, b);
        assert!((a.g_eps.sub(&a.g).unwrap().l2_norm() - 1e-3).abs() < 1e-15);
        let clean = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 0.0, 42, ACCEPT_GRID).unwrap();
        assert_eq!(clean.g_eps, clean.g);
        // unit-area peaks: ∫f = Σ amplitudes
        let area: f64 = a.f.samples().iter().sum::<f64>() * a.f.dx();
        assert!((area - 1.7).abs() < 1e-12);
    }

    #[test]
    fn synth_rejects_boundary_peaks() {
        let peaks = [Peak { center: -24.0, amplitude: 1.0, width: 1.0 }];
        assert!(synth_spectrum(&peaks, PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).is_err());
        let narrow = [Peak { center: 0.0, amplitude: 1.0, width: 0.01 }];
        assert!(synth_spectrum(&narrow, PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).is_err());
    }

    #[test]
    fn source_identity_for_each_family() {
        let peaks = [Peak { center: 0.0, amplitude: 1.0, width: 1.0 }];
        for m in PeakModel::ALL {
            let data = synth_spectrum(&peaks, m, 1.0, 0.0, 0, ACCEPT_GRID).unwrap();
            let norm = data.f.l2_norm();
            assert!(source_check(&data.f, m, 1.0).unwrap().abs() <= 1e-6 * norm);
            assert!(source_check(&data.f, m, 2.0).unwrap().abs() <= 1e-6 * norm);
        }
        let zero = GridSignal::zeros(64, 0.1, 0.0).unwrap();
        assert_eq!(source_check(&zero, PeakModel::Gaussian, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sharpen_two_gaussian_peaks() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 1e-3, 42, ACCEPT_GRID).unwrap();
        let cfg = SharpenConfig::new(PeakModel::Gaussian, 1.0, 0.5, 1e-3);
        let rep = sharpen_with_truth(&data.g_eps, &cfg, &data.f_hat).unwrap();
        assert!(rep.discrepancy >= 0.99e-3 && rep.discrepancy <= 1.01e-3);
        assert!(rep.residual_norm <= 2e-3);
        assert!(rep.dominance_ok);
        assert!(rep.empirical_error.unwrap() <= rep.bound);
        assert!(rep.empirical_error.unwrap() <= rep.morozov_bound.unwrap());
        let blind = sharpen(&data.g_eps, &cfg).unwrap();
        assert!(!blind.residuals_measured);
        assert_eq!(blind.z_eps, rep.z_eps);
        assert!(blind.residual_norm <= 2e-3);
    }

    #[test]
    fn degenerate_regime() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).unwrap();
        let eps = 2.0 * data.g.l2_norm();
        for method in [SharpenMethod::TikhonovDiscrepancy, SharpenMethod::SpectralCutoff] {
            let cfg = SharpenConfig::new(PeakModel::Gaussian, 1.0, 0.5, eps).with_method(method);
            let rep = sharpen(&data.g_eps, &cfg).unwrap();
            assert!(rep.degenerate);
            assert!(rep.z_eps.samples().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn nearly_identity_kernel_returns_data() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).unwrap();
        let cfg = SharpenConfig::new(PeakModel::Gaussian, 1.0, 1.0 - 1e-12, 1e-9);
        let rep = sharpen(&data.g, &cfg).unwrap();
        assert!(rep.z_eps.sub(&data.g).unwrap().l2_norm() <= 1e-6);
    }

    #[test]
    fn unattainable_bracket_reports_range() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 1e-3, 1, ACCEPT_GRID).unwrap();
        // noise beyond the kernel's reach keeps the discrepancy near ε, far above 1e-6
        let cfg = SharpenConfig::new(PeakModel::Gaussian, 1.0, 0.5, 1e-6);
        match sharpen(&data.g_eps, &cfg) {
            Err(Error::Bracket { min, .. }) => assert!(min > 1.01e-6),
            other => panic!("expected a bracket failure, got {other:?}"),
        }
    }

    #[test]
    fn cutoff_method_meets_discrepancy() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Exponential, 1.0, 1e-2, 3, ACCEPT_GRID).unwrap();
        let cfg = SharpenConfig::new(PeakModel::Exponential, 1.0, 0.5, 1e-2).with_method(SharpenMethod::SpectralCutoff);
        match sharpen_with_truth(&data.g_eps, &cfg, &data.f_hat) {
            Ok(rep) => {
                assert!(rep.discrepancy >= 0.99e-2 && rep.discrepancy <= 1.01e-2);
                assert!(rep.reg_param > 0.0);
            }
            Err(Error::Bracket { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn morozov_with_unit_weight_is_tikhonov() {
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 1e-3, 5, ACCEPT_GRID).unwrap();
        let base = SharpenConfig::new(PeakModel::Gaussian, 1.0, 0.5, 1e-3);
        let tik = sharpen(&data.g_eps, &base).unwrap();
        let cfg = base.clone().with_method(SharpenMethod::GeneralizedMorozov { theta: IndexFunction::One });
        let moz = morozov_sharpen(&data.g_eps, &cfg, None).unwrap();
        let diff = moz.z_eps.sub(&tik.z_eps).unwrap();
        assert!(diff.samples().iter().all(|v| v.abs() <= 1e-12));
        assert!(morozov_sharpen(&data.g_eps, &base, None).is_err());
    }

    #[test]
    fn morozov_classical_estimate() {
        for &eps in &[1e-2, 1e-3, 1e-4] {
            let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, eps, 7, ACCEPT_GRID).unwrap();
            let theta = IndexFunction::PowerPlusOne { gamma: 1.0 };
            let cfg = SharpenConfig::new(PeakModel::Gaussian, 1.0, 0.5, eps)
                .with_method(SharpenMethod::GeneralizedMorozov { theta });
            let rep = morozov_sharpen(&data.g_eps, &cfg, Some(&data.f_hat)).unwrap();
            assert!(rep.discrepancy >= 0.99 * eps && rep.discrepancy <= 1.01 * eps);
            assert!(rep.empirical_error.unwrap() <= rep.morozov_bound.unwrap());
        }
    }

    #[test]
    fn power_weight_norm_matches_a_one_weight() {
        // sanity check of the ln-space product path against a direct sum
        let data = synth_spectrum(&two_peaks(), PeakModel::Gaussian, 1.0, 0.0, 0, ACCEPT_GRID).unwrap();
        let d = data.f_hat.density();
        let direct: f64 = d.lambdas().iter().zip(d.weights()).map(|(l, w)| (1.0 + l) * w).sum::<f64>().sqrt();
        let v = vhs_norm(&d, &IndexFunction::PowerPlusOne { gamma: 1.0 }).unwrap();
        assert!((v - direct).abs() <= 1e-12 * direct);
    }
}
