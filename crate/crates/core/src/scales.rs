//! Weighted norms and inequality margins.
//!
//! Every inequality is reported as a signed [`Margin`]: `value ≥ 0` means it
//! holds. `scale` is the dominant term, so `value / scale` is the relative
//! margin tested against tolerances. `verified` records whether the
//! hypotheses behind the inequality were certified for the call.

use log::warn;
use serde::Serialize;

use crate::index_fn::{log_grid, ConcaveWitness, IndexFunction};
use crate::spectral::{CrossDensity, SpectralDensity, Spectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margin {
    pub value: f64,
    pub scale: f64,
    pub verified: bool,
}

impl Margin {
    fn new(value: f64, scale: f64, verified: bool) -> Self {
        Margin { value, scale: scale.abs(), verified }
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 && self.scale.is_finite() {
            self.value / self.scale
        } else {
            self.value
        }
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.relative() >= -rel_tol
    }
}

/// `Π φ_i(λ) · w`, through logarithms when the product overflows midway.
fn weighted_term(fns: &[&IndexFunction], lambda: f64, w: f64) -> Result<f64> {
    let mut direct = w;
    for phi in fns {
        direct *= phi.eval(lambda)?;
    }
    if direct.is_finite() && (direct > 0.0 || fns.is_empty()) {
        return Ok(direct);
    }
    let mut ln = w.ln();
    for phi in fns {
        ln += phi.ln_eval(lambda)?;
    }
    Ok(ln.exp())
}

/// `Σ_k Π φ_i(λ_k) w_k` over the positive-mass points.
fn weighted_sum(d: &SpectralDensity, fns: &[&IndexFunction]) -> Result<f64> {
    let mut sum = 0.0;
    for (lambda, w) in d.support() {
        sum += weighted_term(fns, lambda, w)?;
    }
    if sum.is_infinite() {
        warn!("weighted norm overflows; reporting +inf");
    }
    Ok(sum)
}

/// `‖f‖_φ = sqrt(Σ φ(λ_k) w_k)`; `+∞` when the weights overflow.
pub fn vhs_norm(d: &SpectralDensity, phi: &IndexFunction) -> Result<f64> {
    Ok(weighted_sum(d, &[phi])?.sqrt())
}

/// `‖f‖_s` with weight `a(sλ)`.
pub fn dhs_norm(d: &SpectralDensity, a: &IndexFunction, s: f64) -> Result<f64> {
    require_dhs(a)?;
    if s == 0.0 {
        return Ok(d.total().sqrt());
    }
    vhs_norm(d, &a.clone().dilated(s)?)
}

fn require_dhs(a: &IndexFunction) -> Result<()> {
    if !a.is_dhs() {
        return Err(Error::domain(format!("{a:?} does not generate a dilational scale")));
    }
    Ok(())
}

/// A family of norms of one signal.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ScaleNorms {
    pub base: f64,
    pub phi_norm: Option<f64>,
    pub psi_norm: Option<f64>,
    pub theta_norm: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub sigma: Option<f64>,
}

impl ScaleNorms {
    /// `‖f‖`, `‖f‖_{σt}` (as φ) and `‖f‖_t` (as ψ) for a dilational scale.
    pub fn dilational(d: &SpectralDensity, a: &IndexFunction, t: f64, sigma: f64) -> Result<Self> {
        Ok(ScaleNorms {
            base: d.total().sqrt(),
            phi_norm: Some(dhs_norm(d, a, sigma * t)?),
            psi_norm: Some(dhs_norm(d, a, t)?),
            theta_norm: None,
            s: Some(sigma * t),
            t: Some(t),
            sigma: Some(sigma),
        })
    }
}

fn nonzero_total(d: &SpectralDensity, theta: &IndexFunction) -> Result<f64> {
    let total = weighted_sum(d, &[theta])?;
    if !(total > 0.0) {
        return Err(Error::domain("margin undefined for a density with zero θ-mass"));
    }
    Ok(total)
}

/// Generalized Hölder margin together with its pointwise condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderMargin {
    pub margin: Margin,
    /// `min_λ Φ(φ(λ))Ψ(ψ(λ)) − 1` over the support.
    pub condition_margin: f64,
}

/// `Φ(‖f‖²_{φθ}/‖f‖²_θ) · Ψ(‖f‖²_{ψθ}/‖f‖²_θ) − 1`.
///
/// `verified` requires the pointwise condition `1 ≤ Φ(φ)Ψ(ψ)` on the support
/// and certified concavity of both witnesses on the range they are used on.
pub fn holder_margin(
    d: &SpectralDensity,
    phi: &IndexFunction,
    psi: &IndexFunction,
    theta: &IndexFunction,
    big_phi: &ConcaveWitness,
    big_psi: &ConcaveWitness,
) -> Result<HolderMargin> {
    let mut condition = f64::INFINITY;
    let (mut phi_vals, mut psi_vals) = (Vec::new(), Vec::new());
    for (lambda, _) in d.support() {
        let (p, q) = (phi.eval(lambda)?, psi.eval(lambda)?);
        condition = condition.min(big_phi.eval(p) * big_psi.eval(q) - 1.0);
        phi_vals.push(p);
        psi_vals.push(q);
    }
    let total = nonzero_total(d, theta)?;
    let x = weighted_sum(d, &[phi, theta])? / total;
    let y = weighted_sum(d, &[psi, theta])? / total;
    let product = big_phi.eval(x) * big_psi.eval(y);
    let verified = condition >= -1e-12
        && certify_on_values(big_phi, &phi_vals)
        && certify_on_values(big_psi, &psi_vals);
    Ok(HolderMargin {
        margin: Margin::new(product - 1.0, product.max(1.0), verified),
        condition_margin: condition,
    })
}

/// Certifies a witness on at most 64 log-spaced points spanning `values`.
fn certify_on_values(w: &ConcaveWitness, values: &[f64]) -> bool {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0 && hi.is_finite()) {
        return false;
    }
    if hi <= lo {
        return w.eval(lo).is_finite();
    }
    w.certify(&log_grid(lo, hi, 64)).ok
}

/// `‖f‖²_θ · (φ∘ψ⁻¹)(‖f‖²_{ψθ}/‖f‖²_θ) − ‖f‖²_{φθ}`.
///
/// Concavity of `φ∘ψ⁻¹` is certified on the range of `ψ` over the support;
/// without the certificate the inequality is not asserted and the call
/// fails with [`Error::Precondition`].
pub fn interp_margin(d: &SpectralDensity, phi: &IndexFunction, psi: &IndexFunction, theta: &IndexFunction) -> Result<Margin> {
    let psi_vals: Vec<f64> = d.support().map(|(l, _)| psi.eval(l)).collect::<Result<_>>()?;
    let witness = ConcaveWitness::composition(phi.clone(), psi.clone());
    if !certify_on_values(&witness, &psi_vals) {
        return Err(Error::Precondition("φ∘ψ⁻¹ is not certified concave on the support".into()));
    }
    let total = nonzero_total(d, theta)?;
    let lhs = weighted_sum(d, &[phi, theta])?;
    let y = weighted_sum(d, &[psi, theta])? / total;
    let rhs = if phi == psi { y * total } else { total * witness.eval(y) };
    Ok(Margin::new(rhs - lhs, lhs.max(rhs), true))
}

/// `‖f‖²·a(σ·a⁻¹(‖f‖²_t/‖f‖²)) − ‖f‖²_{σt}`.
///
/// `verified` holds for generators with a known scaling profile; tabulated
/// generators must be certified separately through their `α`.
pub fn dhs_interp_margin(d: &SpectralDensity, a: &IndexFunction, t: f64, sigma: f64) -> Result<Margin> {
    require_dhs(a)?;
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::domain(format!("σ must lie in [0, 1], got {sigma}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let base = d.total();
    if !(base > 0.0) {
        return Err(Error::domain("margin undefined for a zero density"));
    }
    let top = dhs_norm(d, a, t)?.powi(2);
    if !top.is_finite() {
        return Err(Error::Overflow(format!("‖f‖_t overflows at t = {t}")));
    }
    let lhs = dhs_norm(d, a, sigma * t)?.powi(2);
    let rhs = if sigma == 1.0 {
        top
    } else {
        base * a.eval(sigma * a.inverse(top / base)?)?
    };
    Ok(Margin::new(rhs - lhs, top, a.has_scaling_generator()))
}

/// `‖g‖_ψ · ‖r‖_{θ²/ψ} − Re (g, r)_θ`.
pub fn variant_cs_margin(g: &Spectrum, r: &Spectrum, theta: &IndexFunction, psi: &IndexFunction) -> Result<Margin> {
    let cross = CrossDensity::from_spectra(g, r)?;
    let (dg, dr) = (g.density(), r.density());
    let mut inner = 0.0;
    for (&lambda, c) in cross.lambdas().iter().zip(cross.weights()) {
        if c.re != 0.0 {
            inner += theta.eval(lambda)? * c.re;
        }
    }
    let g_norm = weighted_sum(&dg, &[psi])?.sqrt();
    let mut r_sq = 0.0;
    for (lambda, w) in dr.support() {
        let p = psi.eval(lambda)?;
        if !(p > 0.0) {
            return Err(Error::domain(format!("ψ vanishes at λ = {lambda}")));
        }
        r_sq += (2.0 * theta.ln_eval(lambda)? - psi.ln_eval(lambda)? + w.ln()).exp();
    }
    let bound = g_norm * r_sq.sqrt();
    Ok(Margin::new(bound - inner, bound.max(inner.abs()), true))
}
