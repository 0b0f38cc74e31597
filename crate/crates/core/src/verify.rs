//! Seeded randomized inequality suites.
//!
//! Each suite draws random spectral densities (or spectra) and records the
//! smallest relative margin. A trial fails when its relative margin is below
//! `−1e-9`. Predicate checks on index functions are reported alongside.

use num_complex::Complex64;
use serde::Serialize;

use crate::index_fn::{
    certificate_grid, check_alpha_scaling, check_cond9, check_convexity_psi_phi_inv, log_grid, AlphaFunction,
    ConcaveWitness, IndexFunction,
};
use crate::report::real;
use crate::rng::NoiseRng;
use crate::scales::{dhs_interp_margin, holder_margin, interp_margin, variant_cs_margin, Margin};
use crate::spectral::{SpectralDensity, Spectrum};
use crate::Result;

pub const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub inequality: String,
    pub trials: usize,
    #[serde(with = "real")]
    pub min_margin: f64,
    pub failures: usize,
    /// Hypotheses certified in every trial.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub ok: bool,
    #[serde(with = "real")]
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteResult>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Random density: 1 to 64 points, `λ` log-uniform in `[1e-3, 10]`,
/// weights spread over three decades. One trial in ten is a point mass.
pub fn random_density(rng: &mut NoiseRng) -> SpectralDensity {
    let n = if rng.uniform() < 0.1 { 1 } else { 2 + (rng.uniform() * 63.0) as usize };
    let mut lambdas: Vec<f64> = (0..n).map(|_| rng.log_uniform(1e-3, 10.0)).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let weights = lambdas.iter().map(|_| rng.log_uniform(1e-3, 1.0)).collect();
    SpectralDensity::new(lambdas, weights).expect("random density is valid")
}

/// Random complex spectrum on a 64-bin grid with `λ ≤ 40`.
pub fn random_spectrum(rng: &mut NoiseRng) -> Spectrum {
    let coeffs = (0..64).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
    Spectrum::new(coeffs, 64, 0.5, 0.0).expect("random spectrum is valid")
}

struct Suite {
    name: String,
    trials: usize,
    min: f64,
    failures: usize,
    verified: bool,
}

impl Suite {
    fn new(name: impl Into<String>) -> Self {
        Suite { name: name.into(), trials: 0, min: f64::INFINITY, failures: 0, verified: true }
    }

    fn record(&mut self, m: Margin) {
        let rel = m.relative();
        self.trials += 1;
        self.min = self.min.min(rel);
        if !(rel >= -MARGIN_TOL) {
            self.failures += 1;
        }
        self.verified &= m.verified;
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            inequality: self.name,
            trials: self.trials,
            min_margin: self.min,
            failures: self.failures,
            verified: self.verified,
        }
    }
}

fn seeded(seed: u64, case: u64) -> NoiseRng {
    NoiseRng::new(seed ^ case.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Generalized Hölder inequality.
pub fn holder_suites(seed: u64, trials: usize) -> Result<Vec<SuiteResult>> {
    let inv = IndexFunction::PowerLaw { p: -1.0 };
    let lin = IndexFunction::PowerLaw { p: 1.0 };
    let exp_half = IndexFunction::Exp.dilated(0.5)?;
    let cases: Vec<(&str, IndexFunction, IndexFunction, IndexFunction, ConcaveWitness, ConcaveWitness)> = vec![
        ("holder: phi=1/l, psi=l, theta=1, Phi=Psi=x", inv.clone(), lin.clone(), IndexFunction::One, ConcaveWitness::identity(), ConcaveWitness::identity()),
        ("holder: phi=1/l, psi=l, theta=l, Phi=Psi=x", inv.clone(), lin.clone(), lin.clone(), ConcaveWitness::identity(), ConcaveWitness::identity()),
        ("holder: phi=1/l, psi=l, theta=1, Phi=Psi=sqrt", inv, lin, IndexFunction::One, ConcaveWitness::power(0.5), ConcaveWitness::power(0.5)),
        (
            "holder: phi=exp(l/2), psi=exp, Phi=1/x, Psi=phi.psi^-1",
            exp_half.clone(),
            IndexFunction::Exp,
            IndexFunction::One,
            ConcaveWitness::reciprocal(),
            ConcaveWitness::composition(exp_half, IndexFunction::Exp),
        ),
    ];
    let mut out = Vec::new();
    for (i, (name, phi, psi, theta, big_phi, big_psi)) in cases.into_iter().enumerate() {
        let mut rng = seeded(seed, 100 + i as u64);
        let mut suite = Suite::new(name);
        for _ in 0..trials {
            let d = random_density(&mut rng);
            suite.record(holder_margin(&d, &phi, &psi, &theta, &big_phi, &big_psi)?.margin);
        }
        out.push(suite.finish());
    }
    Ok(out)
}

/// Interpolation between weighted norms, with and without a `θ` weight.
pub fn interp_suites(seed: u64, trials: usize) -> Result<Vec<SuiteResult>> {
    let p = |e: f64| IndexFunction::PowerLaw { p: e };
    let cases = vec![
        ("interp: phi=l, psi=l^3, theta=1", p(1.0), p(3.0), IndexFunction::One),
        ("interp: phi=l, psi=l^2, theta=l", p(1.0), p(2.0), p(1.0)),
        ("interp: phi=l^0.5, psi=l^2, theta=l^0.5", p(0.5), p(2.0), p(0.5)),
        ("interp: phi=exp(l/2), psi=exp, theta=1", IndexFunction::Exp.dilated(0.5)?, IndexFunction::Exp, IndexFunction::One),
    ];
    let mut out = Vec::new();
    for (i, (name, phi, psi, theta)) in cases.into_iter().enumerate() {
        let mut rng = seeded(seed, 200 + i as u64);
        let mut suite = Suite::new(name);
        for _ in 0..trials {
            let d = random_density(&mut rng);
            suite.record(interp_margin(&d, &phi, &psi, &theta)?);
        }
        out.push(suite.finish());
    }
    Ok(out)
}

/// Dilational interpolation for the three closed-form generators.
pub fn dhs_suites(seed: u64, trials: usize) -> Result<Vec<SuiteResult>> {
    let gens = [
        ("exp", IndexFunction::Exp),
        ("(1+l)^2", IndexFunction::PowerPlusOne { gamma: 2.0 }),
        ("exp(2 sqrt l)", IndexFunction::ExpSqrt),
    ];
    let mut out = Vec::new();
    for (gi, (gname, a)) in gens.iter().enumerate() {
        for (si, &sigma) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
            let mut rng = seeded(seed, 300 + 10 * gi as u64 + si as u64);
            let mut suite = Suite::new(format!("dhs interp: a={gname}, sigma={sigma}"));
            for _ in 0..trials {
                let d = random_density(&mut rng);
                let t = rng.log_uniform(0.1, 2.0);
                suite.record(dhs_interp_margin(&d, a, t, sigma)?);
            }
            out.push(suite.finish());
        }
    }
    Ok(out)
}

/// `(g, r)_θ ≤ ‖g‖_ψ ‖r‖_{θ²/ψ}`.
pub fn cauchy_schwarz_suites(seed: u64, trials: usize) -> Result<Vec<SuiteResult>> {
    let cases = vec![
        ("variant cs: theta=(1+l/2)^2, psi=exp", IndexFunction::PowerPlusOne { gamma: 2.0 }.dilated(0.5)?, IndexFunction::Exp),
        ("variant cs: theta=1, psi=1+l", IndexFunction::One, IndexFunction::PowerPlusOne { gamma: 1.0 }),
    ];
    let mut out = Vec::new();
    for (i, (name, theta, psi)) in cases.into_iter().enumerate() {
        let mut rng = seeded(seed, 400 + i as u64);
        let mut suite = Suite::new(name);
        for t in 0..trials {
            let g = random_spectrum(&mut rng);
            // every fifth trial tests the equality case r = g with ψ = θ
            let m = if t % 5 == 0 {
                variant_cs_margin(&g, &g, &theta, &theta)?
            } else {
                variant_cs_margin(&g, &random_spectrum(&mut rng), &theta, &psi)?
            };
            suite.record(m);
        }
        out.push(suite.finish());
    }
    Ok(out)
}

/// Scaling relation, multiplicativity and convexity predicates, plus the
/// concavity witnesses used by the suites.
pub fn predicate_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let lambdas = log_grid(1e-3, 100.0, 128);
    let upper = log_grid(0.25, 100.0, 128);
    let sigmas = log_grid(1e-3, 1.0, 32);
    let alphas = [
        ("alpha scaling: 1", AlphaFunction::Constant(1.0), &lambdas),
        ("alpha scaling: 1/(1+l)", AlphaFunction::Reciprocal1p, &lambdas),
        ("alpha scaling: (gamma-1)/l, gamma=2", AlphaFunction::PowerlawAlpha { gamma: 2.0 }, &lambdas),
        ("alpha scaling: rational, l >= 1/4", AlphaFunction::RationalAlpha, &upper),
    ];
    for (name, alpha, grid) in alphas {
        let r = check_alpha_scaling(&alpha, grid, &sigmas);
        out.push(CheckResult { check: name.into(), ok: r.ok, margin: -r.max_violation });
    }

    let grid = certificate_grid(100.0);
    let cond9 = [
        ("cond9: exp, tau=rho=1/2", IndexFunction::Exp, 0.5, 0.5),
        ("cond9: exp, tau=0.3, rho=0.7", IndexFunction::Exp, 0.3, 0.7),
        ("cond9: (1+l)^2, tau=0.3, rho=0.7", IndexFunction::PowerPlusOne { gamma: 2.0 }, 0.3, 0.7),
        ("cond9: exp(2 sqrt l), tau=rho=1/4", IndexFunction::ExpSqrt, 0.25, 0.25),
        ("cond9: exp(2 sqrt l), tau=0.09, rho=0.49", IndexFunction::ExpSqrt, 0.09, 0.49),
    ];
    for (name, a, tau, rho) in cond9 {
        let r = check_cond9(&a, tau, rho, &grid)?;
        out.push(CheckResult { check: name.into(), ok: r.ok, margin: r.min_margin });
    }

    let conv_grid = log_grid(1e-6, 20.0, 128);
    for (gname, a) in [
        ("exp", IndexFunction::Exp),
        ("(1+l)^2", IndexFunction::PowerPlusOne { gamma: 2.0 }),
        ("exp(2 sqrt l)", IndexFunction::ExpSqrt),
    ] {
        for sigma in [0.25, 0.5, 0.75, 1.0] {
            let r = check_convexity_psi_phi_inv(&a, sigma, &conv_grid)?;
            out.push(CheckResult { check: format!("convexity: a={gname}, sigma={sigma}"), ok: r.ok, margin: r.min_margin });
        }
    }

    let wgrid = log_grid(1e-3, 1e3, 64);
    for w in [ConcaveWitness::identity(), ConcaveWitness::power(0.5)] {
        let c = w.certify(&wgrid);
        out.push(CheckResult { check: format!("concave witness: {}", w.name()), ok: c.ok, margin: c.min_margin });
    }
    let comp = ConcaveWitness::composition(IndexFunction::Exp.dilated(0.5)?, IndexFunction::Exp);
    let c = comp.certify(&log_grid(1.0, 1e6, 64));
    out.push(CheckResult { check: "concave witness: exp(l/2) o log".into(), ok: c.ok, margin: c.min_margin });
    Ok(out)
}

/// Runs every suite with `trials` trials each and all predicate checks.
pub fn run_all(seed: u64, trials: usize) -> Result<VerifyReport> {
    let mut suites = holder_suites(seed, trials)?;
    suites.extend(interp_suites(seed, trials)?);
    suites.extend(dhs_suites(seed, trials)?);
    suites.extend(cauchy_schwarz_suites(seed, trials)?);
    let checks = predicate_checks()?;
    let passed = suites.iter().all(|s| s.failures == 0) && checks.iter().all(|c| c.ok);
    Ok(VerifyReport { seed, trials, suites, checks, passed })
}
