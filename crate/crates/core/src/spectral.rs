//! Sampled signals and their Fourier-side representation.
//!
//! A [`GridSignal`] lives on the periodic window `[x0, x0 + N·dx)`. The
//! forward transform is the rectangle-rule approximation of the continuous
//! transform `f̂(ω) = ∫ f(x) e^{−iωx} dx`, so that the `1/2π`-normalized
//! formulas for norms hold verbatim on the discrete side:
//!
//! ```text
//! ‖f‖² = Σ_j |f_j|² dx = (Δω / 2π) Σ_k |f̂(ω_k)|²,   Δω = 2π / (N dx)
//! ```
//!
//! Frequencies are stored in increasing order `k = −N/2, …, N/2 − 1` with
//! `ω_k = k Δω`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Uniformly sampled real signal on a periodic window.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSignal {
    samples: Vec<f64>,
    dx: f64,
    x0: f64,
}

fn check_grid(n: usize, dx: f64, x0: f64) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidSignal(format!("sample count must be even and at least 2, got {n}")));
    }
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::InvalidSignal(format!("grid spacing must be positive and finite, got {dx}")));
    }
    if !x0.is_finite() {
        return Err(Error::InvalidSignal(format!("window origin must be finite, got {x0}")));
    }
    Ok(())
}

impl GridSignal {
    pub fn new(samples: Vec<f64>, dx: f64, x0: f64) -> Result<Self> {
        check_grid(samples.len(), dx, x0)?;
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!("sample {j} is not finite")));
        }
        Ok(GridSignal { samples, dx, x0 })
    }

    pub fn zeros(n: usize, dx: f64, x0: f64) -> Result<Self> {
        Self::new(vec![0.0; n], dx, x0)
    }

    /// Samples `f(x0 + j dx)` for `j = 0..n`.
    pub fn from_fn(n: usize, dx: f64, x0: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n, dx, x0)?;
        let samples = (0..n).map(|j| f(x0 + j as f64 * dx)).collect();
        Self::new(samples, dx, x0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Window length `L = N dx`.
    pub fn window_length(&self) -> f64 {
        self.len() as f64 * self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn same_grid(&self, other: &GridSignal) -> bool {
        self.len() == other.len() && self.dx == other.dx && self.x0 == other.x0
    }

    fn check_same_grid(&self, other: &GridSignal) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::InvalidSignal("signals live on different grids".into()))
        }
    }

    /// `alpha·self + beta·other`, sample by sample.
    pub fn combine(&self, alpha: f64, other: &GridSignal, beta: f64) -> Result<GridSignal> {
        self.check_same_grid(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        GridSignal::new(samples, self.dx, self.x0)
    }

    pub fn sub(&self, other: &GridSignal) -> Result<GridSignal> {
        self.combine(1.0, other, -1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }
}

/// `sqrt(Σ_j |f_j|² dx)`.
pub fn l2_norm(f: &GridSignal) -> f64 {
    (f.samples.iter().map(|v| v * v).sum::<f64>() * f.dx).sqrt()
}

/// Fourier coefficients on the frequency grid `ω_k = 2πk/(N dx)`,
/// `k ∈ [−N/2, N/2)`, stored in increasing `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
    dx: f64,
    x0: f64,
}

impl Spectrum {
    /// Builds a spectrum for a grid of `n` samples; `coeffs.len()` must equal `n`.
    pub fn new(coeffs: Vec<Complex64>, n: usize, dx: f64, x0: f64) -> Result<Self> {
        check_grid(n, dx, x0)?;
        if coeffs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: coeffs.len() });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidSignal("spectrum has non-finite coefficients".into()));
        }
        Ok(Spectrum { coeffs, dx, x0 })
    }

    pub fn zeros(n: usize, dx: f64, x0: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], n, dx, x0)
    }

    /// Evaluates `f(ω_k)` on every bin.
    pub fn from_fn(n: usize, dx: f64, x0: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_grid(n, dx, x0)?;
        let dw = TWO_PI / (n as f64 * dx);
        let half = (n / 2) as i64;
        let coeffs = (0..n as i64).map(|i| f((i - half) as f64 * dw)).collect();
        Self::new(coeffs, n, dx, x0)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn delta_omega(&self) -> f64 {
        TWO_PI / (self.len() as f64 * self.dx)
    }

    /// Integer frequency index of storage slot `i`.
    pub fn k(&self, i: usize) -> i64 {
        i as i64 - (self.len() / 2) as i64
    }

    /// Storage slot of integer frequency `k`.
    pub fn index_of(&self, k: i64) -> usize {
        (k + (self.len() / 2) as i64) as usize
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.k(i) as f64 * self.delta_omega()
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.omega(i))
    }

    pub fn same_grid(&self, other: &Spectrum) -> bool {
        self.len() == other.len() && self.dx == other.dx && self.x0 == other.x0
    }

    /// Applies `f(ω, coeff)` to every bin.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(self.omega(i), c))
            .collect();
        Spectrum { coeffs, dx: self.dx, x0: self.x0 }
    }

    /// Bin-wise combination of two spectra on the same grid.
    pub fn zip_with(&self, other: &Spectrum, f: impl Fn(f64, Complex64, Complex64) -> Complex64) -> Result<Spectrum> {
        if !self.same_grid(other) {
            return Err(Error::InvalidSignal("spectra live on different grids".into()));
        }
        let coeffs = (0..self.len())
            .map(|i| f(self.omega(i), self.coeffs[i], other.coeffs[i]))
            .collect();
        Ok(Spectrum { coeffs, dx: self.dx, x0: self.x0 })
    }

    pub fn density(&self) -> SpectralDensity {
        let n = self.len();
        let half = n / 2;
        let scale = self.delta_omega() / TWO_PI;
        let dw = self.delta_omega();
        let mut lambdas = Vec::with_capacity(half + 1);
        let mut weights = Vec::with_capacity(half + 1);
        for m in 0..=half {
            let omega = m as f64 * dw;
            let pos = self.coeffs[(half + m) % n].norm_sqr();
            // ω = 0 and the Nyquist bin have no partner
            let w = if m == 0 || m == half {
                pos
            } else {
                pos + self.coeffs[half - m].norm_sqr()
            };
            lambdas.push(omega * omega);
            weights.push(w * scale);
        }
        SpectralDensity { lambdas, weights }
    }

    /// Ambient norm computed on the Fourier side.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.delta_omega() / TWO_PI).sqrt()
    }
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

/// Continuous-scaled forward transform `f̂(ω_k) ≈ Σ_j f_j e^{−iω_k x_j} dx`.
pub fn dft_forward(f: &GridSignal) -> Spectrum {
    let n = f.len();
    let mut buf: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(n, false).process(&mut buf);
    let half = (n / 2) as i64;
    let dw = TWO_PI / (n as f64 * f.dx);
    let coeffs = (0..n as i64)
        .map(|i| {
            let k = i - half;
            let omega = k as f64 * dw;
            let phase = Complex64::from_polar(f.dx, -omega * f.x0);
            buf[k.rem_euclid(n as i64) as usize] * phase
        })
        .collect();
    Spectrum { coeffs, dx: f.dx, x0: f.x0 }
}

/// Inverse of [`dft_forward`]; the imaginary part of the result is dropped.
pub fn dft_inverse(spec: &Spectrum) -> Result<GridSignal> {
    let n = spec.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &c) in spec.coeffs.iter().enumerate() {
        let k = spec.k(i);
        let omega = spec.omega(i);
        buf[k.rem_euclid(n as i64) as usize] = c * Complex64::from_polar(1.0 / spec.dx, omega * spec.x0);
    }
    plan(n, true).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    GridSignal::new(buf.iter().map(|c| c.re * inv_n).collect(), spec.dx, spec.x0)
}

/// Discrete spectral measure `dE_ff` over `λ = ω²`.
///
/// Each entry collects the energy of the `±ω` pair; the `ω = 0` and Nyquist
/// bins contribute once.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralDensity {
    pub fn new(lambdas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if lambdas.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: lambdas.len(), got: weights.len() });
        }
        if lambdas.is_empty() {
            return Err(Error::domain("spectral density needs at least one point"));
        }
        if !(lambdas[0] >= 0.0) || lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::domain("spectral points must be finite and nonnegative"));
        }
        if lambdas.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::domain("spectral points must be strictly ascending"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::domain("spectral weights must be finite and nonnegative"));
        }
        Ok(SpectralDensity { lambdas, weights })
    }

    pub fn point_mass(lambda: f64, weight: f64) -> Result<Self> {
        Self::new(vec![lambda], vec![weight])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `Σ w_k = ‖f‖²`.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Points carrying positive mass.
    pub fn support(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambdas
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&l, &w)| (l, w))
    }
}

/// `dE_ff` of a sampled signal.
pub fn spectral_density(f: &GridSignal) -> SpectralDensity {
    dft_forward(f).density()
}

/// Complex cross measure `dE_gr` over `λ = ω²`:
/// `(1/2π)(conj(ĝ(ω)) r̂(ω) + conj(ĝ(−ω)) r̂(−ω)) Δω`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossDensity {
    lambdas: Vec<f64>,
    weights: Vec<Complex64>,
}

impl CrossDensity {
    pub fn from_spectra(g: &Spectrum, r: &Spectrum) -> Result<Self> {
        if !g.same_grid(r) {
            return Err(Error::InvalidSignal("spectra live on different grids".into()));
        }
        let n = g.len();
        let half = n / 2;
        let scale = g.delta_omega() / TWO_PI;
        let dw = g.delta_omega();
        let cross = |i: usize| g.coeffs[i].conj() * r.coeffs[i];
        let mut lambdas = Vec::with_capacity(half + 1);
        let mut weights = Vec::with_capacity(half + 1);
        for m in 0..=half {
            let omega = m as f64 * dw;
            let w = if m == 0 {
                cross(half)
            } else if m == half {
                cross(0)
            } else {
                cross(half + m) + cross(half - m)
            };
            lambdas.push(omega * omega);
            weights.push(w * scale);
        }
        Ok(CrossDensity { lambdas, weights })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::NoiseRng;

    fn noise(n: usize, dx: f64, x0: f64, seed: u64) -> GridSignal {
        let mut rng = NoiseRng::new(seed);
        GridSignal::new((0..n).map(|_| rng.normal()).collect(), dx, x0).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSignal::new(vec![1.0; 3], 0.1, 0.0).is_err());
        assert!(GridSignal::new(vec![1.0], 0.1, 0.0).is_err());
        assert!(GridSignal::new(vec![1.0, f64::NAN], 0.1, 0.0).is_err());
        assert!(GridSignal::new(vec![1.0, 2.0], 0.0, 0.0).is_err());
        assert!(GridSignal::new(vec![1.0, 2.0], 0.1, f64::INFINITY).is_err());
    }

    #[test]
    fn constant_signal_has_single_zero_frequency_bin() {
        let f = GridSignal::from_fn(64, 0.25, -8.0, |_| 1.0).unwrap();
        let spec = dft_forward(&f);
        let l = f.window_length();
        for (i, c) in spec.coeffs().iter().enumerate() {
            let expected = if spec.k(i) == 0 { l } else { 0.0 };
            assert!((c - Complex64::new(expected, 0.0)).norm() < 1e-10, "bin {i}: {c}");
        }
    }

    #[test]
    fn cosine_splits_mass_at_plus_minus_omega() {
        let (n, dx, x0) = (128, 0.1, -6.4);
        let w1 = TWO_PI / (n as f64 * dx);
        let f = GridSignal::from_fn(n, dx, x0, |x| (w1 * x).cos()).unwrap();
        let spec = dft_forward(&f);
        let l = f.window_length();
        for (i, c) in spec.coeffs().iter().enumerate() {
            let expected = if spec.k(i).abs() == 1 { l / 2.0 } else { 0.0 };
            assert!((c.norm() - expected).abs() < 1e-10, "bin {}: {}", spec.k(i), c);
        }

        let d = spectral_density(&f);
        let norm2 = f.l2_norm().powi(2);
        for (lambda, w) in d.lambdas().iter().zip(d.weights()) {
            if (lambda - w1 * w1).abs() < 1e-12 {
                assert!((w - norm2).abs() < 1e-10 * norm2);
            } else {
                assert!(w.abs() < 1e-20);
            }
        }
    }

    #[test]
    fn inverse_of_single_pair_is_cosine() {
        let (n, dx, x0) = (32, 0.5, 3.0);
        let mut spec = Spectrum::zeros(n, dx, x0).unwrap();
        let l = n as f64 * dx;
        let (ip, im) = (spec.index_of(1), spec.index_of(-1));
        spec.coeffs[ip] = Complex64::new(l / 2.0, 0.0);
        spec.coeffs[im] = Complex64::new(l / 2.0, 0.0);
        let f = dft_inverse(&spec).unwrap();
        let w1 = spec.delta_omega();
        for j in 0..n {
            assert!((f.samples()[j] - (w1 * f.x(j)).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_spectrum_is_zero_signal() {
        let f = dft_inverse(&Spectrum::zeros(16, 0.3, 0.0).unwrap()).unwrap();
        assert!(f.samples().iter().all(|&v| v == 0.0));
        let d = spectral_density(&f);
        assert!(d.weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn roundtrip_and_parseval_on_noise() {
        for seed in 0..8 {
            let f = noise(256, 0.07, -5.0 + seed as f64, seed);
            let back = dft_inverse(&dft_forward(&f)).unwrap();
            for (a, b) in f.samples().iter().zip(back.samples()) {
                assert!((a - b).abs() < 1e-12);
            }
            // oracle: direct sample-domain sum
            let direct: f64 = f.samples().iter().map(|v| v * v).sum::<f64>() * f.dx();
            let d = spectral_density(&f);
            assert!((d.total() - direct).abs() <= 1e-10 * direct);
            assert!((l2_norm(&f) - d.total().sqrt()).abs() <= 1e-10 * direct.sqrt());
        }
    }

    #[test]
    fn l2_norm_of_unit_constant() {
        let f = GridSignal::from_fn(8, 0.5, 0.0, |_| 1.0).unwrap();
        assert!((l2_norm(&f) - 2.0).abs() < 1e-15);
        assert_eq!(l2_norm(&GridSignal::zeros(8, 0.5, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn density_lambdas_are_ascending_from_zero() {
        let d = spectral_density(&noise(64, 0.2, 0.0, 3));
        assert_eq!(d.lambdas()[0], 0.0);
        assert_eq!(d.len(), 33);
        assert!(d.lambdas().windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn density_validation() {
        assert!(SpectralDensity::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SpectralDensity::new(vec![-1.0], vec![1.0]).is_err());
        assert!(SpectralDensity::new(vec![1.0], vec![-1.0]).is_err());
        assert!(SpectralDensity::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn spectrum_length_is_checked() {
        let err = Spectrum::new(vec![Complex64::new(0.0, 0.0); 6], 8, 0.1, 0.0).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 8, got: 6 }));
    }

    #[test]
    fn cross_density_of_signal_with_itself_is_its_density() {
        let f = noise(64, 0.2, 0.0, 9);
        let s = dft_forward(&f);
        let cross = CrossDensity::from_spectra(&s, &s).unwrap();
        let d = s.density();
        for (c, w) in cross.weights().iter().zip(d.weights()) {
            assert!((c.re - w).abs() <= 1e-14 * w.max(1e-300));
            assert!(c.im.abs() <= 1e-14 * w.max(1e-300));
        }
    }
}
