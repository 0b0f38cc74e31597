//! Index functions and their certificates.
//!
//! An index function weights the spectral measure: `‖f‖²_φ = ∫ φ(λ) dE_ff(λ)`.
//! The dilational family is `φ_s(λ) = a(sλ)` for an increasing generator
//! `a` with `a(0) = 1`. Every variant except [`IndexFunction::PowerLaw`]
//! is such a generator (or a dilation of one).

use std::fmt;
use std::sync::Arc;

use crate::deconv::PeakModel;
use crate::quad::adaptive_simpson;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum IndexFunction {
    /// `exp(λ)`
    Exp,
    /// `(1 + λ)^γ`, `γ > 0`
    PowerPlusOne { gamma: f64 },
    /// `1 + λ^γ`, `γ ≥ 1`
    OnePlusPower { gamma: f64 },
    /// `exp(2√λ)`
    ExpSqrt,
    /// `λ^p`; not a dilational generator since it vanishes (or blows up) at 0.
    PowerLaw { p: f64 },
    Tabulated(TabulatedFunction),
    /// `base(s·λ)`
    Dilated { base: Box<IndexFunction>, s: f64 },
    /// The constant 1.
    One,
}

impl IndexFunction {
    pub fn power_plus_one(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::domain(format!("(1+λ)^γ needs γ > 0, got {gamma}")));
        }
        Ok(IndexFunction::PowerPlusOne { gamma })
    }

    pub fn one_plus_power(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::domain(format!("1+λ^γ needs γ ≥ 1, got {gamma}")));
        }
        Ok(IndexFunction::OnePlusPower { gamma })
    }

    pub fn power_law(p: f64) -> Result<Self> {
        if !p.is_finite() || p == 0.0 {
            return Err(Error::domain(format!("λ^p needs a finite nonzero exponent, got {p}")));
        }
        Ok(IndexFunction::PowerLaw { p })
    }

    /// `self(s·λ)`.
    pub fn dilated(self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::domain(format!("dilation must be finite and nonnegative, got {s}")));
        }
        Ok(IndexFunction::Dilated { base: Box::new(self), s })
    }

    /// Admissible as a dilational generator: `a(0) = 1` and nondecreasing.
    pub fn is_dhs(&self) -> bool {
        match self {
            IndexFunction::PowerLaw { .. } => false,
            IndexFunction::Dilated { base, .. } => base.is_dhs(),
            _ => true,
        }
    }

    /// Generators whose scaling profile `α = ä/ȧ` is known to satisfy
    /// `α(σλ) ≤ α(λ)/σ`, so the dilational interpolation inequality holds
    /// without a numerical certificate.
    pub fn has_scaling_generator(&self) -> bool {
        match self {
            IndexFunction::Exp | IndexFunction::ExpSqrt | IndexFunction::One => true,
            IndexFunction::PowerPlusOne { gamma } | IndexFunction::OnePlusPower { gamma } => *gamma >= 1.0,
            IndexFunction::Dilated { base, .. } => base.has_scaling_generator(),
            IndexFunction::PowerLaw { .. } | IndexFunction::Tabulated(_) => false,
        }
    }

    fn check_arg(&self, lambda: f64) -> Result<()> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::domain(format!("index functions are evaluated on λ ≥ 0, got {lambda}")));
        }
        Ok(())
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        self.check_arg(lambda)?;
        Ok(match self {
            IndexFunction::Exp => lambda.exp(),
            IndexFunction::PowerPlusOne { gamma } => (1.0 + lambda).powf(*gamma),
            IndexFunction::OnePlusPower { gamma } => 1.0 + lambda.powf(*gamma),
            IndexFunction::ExpSqrt => (2.0 * lambda.sqrt()).exp(),
            IndexFunction::PowerLaw { p } => {
                if lambda == 0.0 {
                    return Err(Error::domain("λ^p is not an index function value at λ = 0"));
                }
                lambda.powf(*p)
            }
            IndexFunction::Tabulated(t) => t.eval(lambda)?,
            IndexFunction::Dilated { base, s } => base.eval(s * lambda)?,
            IndexFunction::One => 1.0,
        })
    }

    /// `ln φ(λ)`, finite wherever the logarithm is even when `φ(λ)` itself
    /// overflows.
    pub fn ln_eval(&self, lambda: f64) -> Result<f64> {
        self.check_arg(lambda)?;
        Ok(match self {
            IndexFunction::Exp => lambda,
            IndexFunction::PowerPlusOne { gamma } => gamma * lambda.ln_1p(),
            IndexFunction::OnePlusPower { gamma } => {
                let p = lambda.powf(*gamma);
                if p.is_finite() {
                    p.ln_1p()
                } else {
                    gamma * lambda.ln()
                }
            }
            IndexFunction::ExpSqrt => 2.0 * lambda.sqrt(),
            IndexFunction::PowerLaw { p } => {
                if lambda == 0.0 {
                    return Err(Error::domain("λ^p is not an index function value at λ = 0"));
                }
                p * lambda.ln()
            }
            IndexFunction::Tabulated(t) => t.eval(lambda)?.ln(),
            IndexFunction::Dilated { base, s } => base.ln_eval(s * lambda)?,
            IndexFunction::One => 0.0,
        })
    }

    /// `a(0)` for the generators; `None` for power laws.
    pub fn value_at_zero(&self) -> Option<f64> {
        match self {
            IndexFunction::PowerLaw { .. } => None,
            IndexFunction::Tabulated(t) => Some(t.values[0]),
            IndexFunction::Dilated { base, .. } => base.value_at_zero(),
            _ => Some(1.0),
        }
    }

    /// `a⁻¹(y)`; closed form where one exists, bisection for tables.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::domain(format!("cannot invert at non-finite value {y}")));
        }
        if let Some(a0) = self.value_at_zero() {
            if y < a0 {
                return Err(Error::domain(format!("{y} is below a(0) = {a0}")));
            }
        }
        Ok(match self {
            IndexFunction::Exp => y.ln(),
            IndexFunction::PowerPlusOne { gamma } => y.powf(1.0 / gamma) - 1.0,
            IndexFunction::OnePlusPower { gamma } => (y - 1.0).powf(1.0 / gamma),
            IndexFunction::ExpSqrt => {
                let h = 0.5 * y.ln();
                h * h
            }
            IndexFunction::PowerLaw { p } => {
                if y <= 0.0 {
                    return Err(Error::domain(format!("λ^p takes only positive values, got {y}")));
                }
                y.powf(1.0 / p)
            }
            IndexFunction::Tabulated(t) => t.inverse(y)?,
            IndexFunction::Dilated { base, s } => {
                if *s == 0.0 {
                    return Err(Error::domain("a zero dilation is constant and has no inverse"));
                }
                base.inverse(y)? / s
            }
            IndexFunction::One => return Err(Error::domain("the constant index function has no inverse")),
        })
    }
}

/// `a(s·λ)`.
pub fn eval_dilated(a: &IndexFunction, s: f64, lambda: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::domain(format!("dilation must be finite and nonnegative, got {s}")));
    }
    a.eval(s * lambda)
}

/// Generator matched to a peak shape: `a(λ) = 1/|B̂(√λ)|²`.
pub fn from_peak(model: PeakModel) -> IndexFunction {
    match model {
        PeakModel::Gaussian => IndexFunction::Exp,
        PeakModel::Exponential => IndexFunction::PowerPlusOne { gamma: 2.0 },
        PeakModel::Rational => IndexFunction::ExpSqrt,
    }
}

/// Strictly increasing table with cubic Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFunction {
    lambdas: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedFunction {
    /// Table with monotone (Fritsch–Carlson) slope estimates.
    pub fn new(lambdas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::validate(&lambdas, &values)?;
        let slopes = pchip_slopes(&lambdas, &values);
        Ok(TabulatedFunction { lambdas, values, slopes })
    }

    pub fn with_slopes(lambdas: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        Self::validate(&lambdas, &values)?;
        if slopes.len() != lambdas.len() {
            return Err(Error::LengthMismatch { expected: lambdas.len(), got: slopes.len() });
        }
        if slopes.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::domain("table slopes must be finite and nonnegative"));
        }
        Ok(TabulatedFunction { lambdas, values, slopes })
    }

    fn validate(lambdas: &[f64], values: &[f64]) -> Result<()> {
        if lambdas.len() != values.len() {
            return Err(Error::LengthMismatch { expected: lambdas.len(), got: values.len() });
        }
        if lambdas.len() < 2 {
            return Err(Error::domain("a table needs at least two nodes"));
        }
        if lambdas.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(Error::domain("table entries must be finite"));
        }
        if lambdas[0] < 0.0 {
            return Err(Error::domain("table nodes must be nonnegative"));
        }
        if let Some(i) = lambdas.windows(2).position(|p| p[1] <= p[0]) {
            return Err(Error::domain(format!("table nodes not strictly ascending at row {}", i + 1)));
        }
        if let Some(i) = values.windows(2).position(|p| p[1] <= p[0]) {
            return Err(Error::domain(format!("table values not strictly increasing at row {}", i + 1)));
        }
        if values[0] <= 0.0 {
            return Err(Error::domain("table values must be positive"));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lambda_max(&self) -> f64 {
        *self.lambdas.last().unwrap()
    }

    fn hermite(&self, i: usize, lambda: f64) -> f64 {
        let (x0, x1) = (self.lambdas[i], self.lambdas[i + 1]);
        let h = x1 - x0;
        let t = (lambda - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i] + h10 * h * self.slopes[i] + h01 * self.values[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn eval(&self, lambda: f64) -> Result<f64> {
        let (lo, hi) = (self.lambdas[0], self.lambda_max());
        // allow for the rounding of a dilated argument at the top node
        let lambda = if lambda > hi && lambda <= hi * (1.0 + 1e-12) { hi } else { lambda };
        if !(lo..=hi).contains(&lambda) {
            return Err(Error::domain(format!("λ = {lambda} outside table range [{lo}, {hi}]")));
        }
        let i = self.lambdas.partition_point(|&x| x <= lambda).clamp(1, self.lambdas.len() - 1) - 1;
        if lambda == self.lambdas[i] {
            return Ok(self.values[i]);
        }
        Ok(self.hermite(i, lambda))
    }

    /// Smallest `λ` (to 1e-12) with `a(λ) ≥ y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let (v0, vn) = (self.values[0], *self.values.last().unwrap());
        if !(v0..=vn).contains(&y) {
            return Err(Error::domain(format!("{y} outside table value range [{v0}, {vn}]")));
        }
        let j = self.values.partition_point(|&v| v < y);
        if self.values[j] == y {
            return Ok(self.lambdas[j]);
        }
        let i = j - 1;
        let (mut lo, mut hi) = (self.lambdas[i], self.lambdas[j]);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.hermite(i, mid) >= y {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (w1, w2) = (2.0 * h[i] + h[i - 1], h[i] + 2.0 * h[i - 1]);
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s < 0.0 {
            0.0
        } else if (d0 - d1) * (s - 3.0 * d0) > 0.0 && s > 3.0 * d0 {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// Logarithmic derivative profile `α = ä/ȧ` from which a generator is built.
#[derive(Clone)]
pub enum AlphaFunction {
    Constant(f64),
    /// `1/(1+λ)`
    Reciprocal1p,
    /// `(γ−1)/λ`
    PowerlawAlpha { gamma: f64 },
    /// `(1 − 1/(2√λ))/√λ`; negative below `λ = 1/4`.
    RationalAlpha,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for AlphaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaFunction::Constant(v) => write!(f, "Constant({v})"),
            AlphaFunction::Reciprocal1p => write!(f, "Reciprocal1p"),
            AlphaFunction::PowerlawAlpha { gamma } => write!(f, "PowerlawAlpha {{ gamma: {gamma} }}"),
            AlphaFunction::RationalAlpha => write!(f, "RationalAlpha"),
            AlphaFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl AlphaFunction {
    pub fn eval(&self, lambda: f64) -> f64 {
        match self {
            AlphaFunction::Constant(v) => *v,
            AlphaFunction::Reciprocal1p => 1.0 / (1.0 + lambda),
            AlphaFunction::PowerlawAlpha { gamma } => (gamma - 1.0) / lambda,
            AlphaFunction::RationalAlpha => {
                let r = lambda.sqrt();
                (1.0 - 0.5 / r) / r
            }
            AlphaFunction::Custom(f) => f(lambda),
        }
    }

    /// `∫_lo^hi α(s) ds` for `0 < lo, hi`, integrated in `ln s` so that
    /// `1/s`-type behaviour near zero stays resolvable.
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        if let AlphaFunction::PowerlawAlpha { gamma } = self {
            return (gamma - 1.0) * (hi.ln() - lo.ln());
        }
        let g = |v: f64| {
            let s = v.exp();
            self.eval(s) * s
        };
        adaptive_simpson(&g, lo.ln(), hi.ln(), 1e-13)
    }
}

const ALPHA_FLOOR: f64 = 1e-300;

/// Tabulates `a(λ) = 1 + c ∫_0^λ exp(∫_1^t α(s) ds) dt` on `n + 1` uniform
/// nodes of `[0, λ_max]`.
pub fn generate_from_alpha(alpha: &AlphaFunction, c: f64, lambda_max: f64, n: usize) -> Result<IndexFunction> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!("generator constant must be positive, got {c}")));
    }
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::domain(format!("λ_max must be positive and finite, got {lambda_max}")));
    }
    if n < 64 {
        return Err(Error::domain(format!("at least 64 intervals are required, got {n}")));
    }
    let h = lambda_max / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    for &t in nodes.iter().skip(1) {
        if !alpha.eval(t).is_finite() {
            return Err(Error::domain(format!("α is not finite at λ = {t}")));
        }
    }

    // ∫_1^t α at every positive node
    let log_rate: Vec<f64> = nodes
        .iter()
        .map(|&t| if t == 0.0 { f64::NAN } else { alpha.integral(1.0, t) })
        .collect();

    let mut values = Vec::with_capacity(n + 1);
    values.push(1.0);
    for i in 0..n {
        let piece = if i == 0 {
            // t = u² absorbs t^{-1/2}-type singularities of exp(∫α) at the origin
            let anchor = (nodes[1], log_rate[1]);
            let f = |u: f64| {
                let u = u.max(1e-150);
                let t = u * u;
                2.0 * u * (anchor.1 - alpha.integral(t, anchor.0)).exp()
            };
            adaptive_simpson(&f, 0.0, nodes[1].sqrt(), 1e-12)
        } else {
            let (t0, base) = (nodes[i], log_rate[i]);
            let f = |t: f64| (base + alpha.integral(t0, t)).exp();
            adaptive_simpson(&f, t0, nodes[i + 1], 1e-12)
        };
        let next = values[i] + c * piece;
        if !next.is_finite() {
            return Err(Error::Overflow(format!("generator overflows before λ = {}", nodes[i + 1])));
        }
        values.push(next);
    }

    let mut slopes: Vec<f64> = log_rate.iter().map(|&r| c * r.exp()).collect();
    // a singular slope at the origin is limited to keep the first cell monotone
    let secant = (values[1] - values[0]) / h;
    slopes[0] = (c * alpha.integral(1.0, ALPHA_FLOOR).exp()).min(3.0 * secant);
    if slopes.iter().any(|s| !s.is_finite()) {
        return Err(Error::Overflow("generator slope overflows".into()));
    }
    Ok(IndexFunction::Tabulated(TabulatedFunction::with_slopes(nodes, values, slopes)?))
}

/// `n` log-spaced nodes on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "log_grid needs 0 < lo < hi and n >= 2");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Default certificate grid: 512 log-spaced nodes over `[1e-6, λ_max]`.
pub fn certificate_grid(lambda_max: f64) -> Vec<f64> {
    log_grid(1e-6, lambda_max, 512)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub max_violation: f64,
    pub ok: bool,
}

/// Largest violation of `α(σλ) ≤ α(λ)/σ` over the grids, relative to
/// `max(1, |α(λ)/σ|)`.
pub fn check_alpha_scaling(alpha: &AlphaFunction, lambda_grid: &[f64], sigma_grid: &[f64]) -> ScalingReport {
    let mut worst = f64::NEG_INFINITY;
    for &lambda in lambda_grid {
        let base = alpha.eval(lambda);
        for &sigma in sigma_grid {
            let rhs = base / sigma;
            let v = (alpha.eval(sigma * lambda) - rhs) / rhs.abs().max(1.0);
            worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
            if worst.is_nan() {
                return ScalingReport { max_violation: f64::NAN, ok: false };
            }
        }
    }
    ScalingReport { max_violation: worst, ok: worst <= 1e-12 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cond9Report {
    pub min_margin: f64,
    pub ok: bool,
}

/// `min_λ (a(τλ)a(ρλ) − a(λ)) / a(λ)` over the grid.
pub fn check_cond9(a: &IndexFunction, tau: f64, rho: f64, lambda_grid: &[f64]) -> Result<Cond9Report> {
    for (name, v) in [("tau", tau), ("rho", rho)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::domain(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    let mut worst = f64::INFINITY;
    for &lambda in lambda_grid {
        let log_ratio = a.ln_eval(tau * lambda)? + a.ln_eval(rho * lambda)? - a.ln_eval(lambda)?;
        worst = worst.min(log_ratio.exp_m1());
    }
    Ok(Cond9Report { min_margin: worst, ok: worst >= -1e-12 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub min_margin: f64,
    pub ok: bool,
}

/// Midpoint convexity of `θ(y) = a(a⁻¹(y)/σ)` on the image `y = a(λ)` of
/// the grid, over every pair of nodes. Margins are relative to the chord.
pub fn check_convexity_psi_phi_inv(a: &IndexFunction, sigma: f64, lambda_grid: &[f64]) -> Result<ConvexityReport> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::domain(format!("σ must lie in (0, 1], got {sigma}")));
    }
    let ys: Vec<f64> = lambda_grid.iter().map(|&l| a.eval(l)).collect::<Result<_>>()?;
    let thetas: Vec<f64> = lambda_grid.iter().map(|&l| a.eval(l / sigma)).collect::<Result<_>>()?;
    if ys.iter().chain(&thetas).any(|v| !v.is_finite()) {
        return Err(Error::Overflow("convexity certificate grid overflows the generator".into()));
    }
    let theta = |y: f64| -> Result<f64> { a.eval(a.inverse(y)? / sigma) };
    let mut worst = f64::INFINITY;
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            let chord = 0.5 * (thetas[i] + thetas[j]);
            let mid = theta(0.5 * (ys[i] + ys[j]))?;
            worst = worst.min((chord - mid) / chord.abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(ConvexityReport { min_margin: worst, ok: worst >= -1e-10 })
}

/// A concave function `(0,∞) → (0,∞)` together with a way to certify it.
#[derive(Clone)]
pub struct ConcaveWitness {
    name: String,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ConcaveWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConcaveWitness").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityCertificate {
    pub min_margin: f64,
    pub ok: bool,
}

impl ConcaveWitness {
    pub fn new(name: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ConcaveWitness { name: name.into(), func: Arc::new(func) }
    }

    pub fn identity() -> Self {
        Self::new("x", |x| x)
    }

    /// `1/x`. Convex, so it never passes [`ConcaveWitness::certify`]; kept
    /// for the reciprocal/composition pairing that yields the interpolation
    /// inequality.
    pub fn reciprocal() -> Self {
        Self::new("1/x", |x| 1.0 / x)
    }

    /// `x^q`, concave for `0 < q ≤ 1`.
    pub fn power(q: f64) -> Self {
        Self::new(format!("x^{q}"), move |x: f64| x.powf(q))
    }

    /// `φ∘ψ⁻¹`; evaluates to NaN outside the domain of `ψ⁻¹`.
    pub fn composition(phi: IndexFunction, psi: IndexFunction) -> Self {
        Self::new("phi∘psi⁻¹", move |y| psi.inverse(y).and_then(|t| phi.eval(t)).unwrap_or(f64::NAN))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.func)(x)
    }

    /// Midpoint concavity `Φ((x+y)/2) ≥ (Φ(x)+Φ(y))/2` over every pair of
    /// grid nodes, to 1e-12 relative to the chord.
    pub fn certify(&self, grid: &[f64]) -> ConcavityCertificate {
        let vals: Vec<f64> = grid.iter().map(|&x| self.eval(x)).collect();
        let mut worst = f64::INFINITY;
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let chord = 0.5 * (vals[i] + vals[j]);
                let mid = self.eval(0.5 * (grid[i] + grid[j]));
                let m = (mid - chord) / chord.abs().max(f64::MIN_POSITIVE);
                if m.is_nan() {
                    return ConcavityCertificate { min_margin: f64::NAN, ok: false };
                }
                worst = worst.min(m);
            }
        }
        ConcavityCertificate { min_margin: worst, ok: worst >= -1e-12 }
    }
}
